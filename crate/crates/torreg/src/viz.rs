//! Deterministic SVG emitters for circular-data plots.
//!
//! Output is byte-stable: coordinates are formatted with four decimals,
//! nothing depends on the clock or the environment. Three plots are
//! supported:
//!
//! * the circular scatter plot, which places the i-th of n angles on a
//!   concentric guide circle of radius i/n;
//! * the spoke plot, which puts observed angles on an outer ring, predicted
//!   angles on an inner ring, and connects each pair with a chord;
//! * a plain QQ scatter of rank-paired angles.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::Angle;

/// Marker shape for a plot series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marker {
    Circle,
    Cross,
    Box,
}

/// One named series of angles.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub label: String,
    pub angles: Vec<Angle>,
    pub marker: Marker,
    /// Hex color of the form `#rrggbb`.
    pub color: String,
}

impl PlotSeries {
    pub fn new(label: &str, angles: Vec<Angle>, marker: Marker, color: &str) -> Result<Self> {
        if label.is_empty() {
            return Err(Error::Precondition("series label must be nonempty".into()));
        }
        let valid_color = color.len() == 7
            && color.starts_with('#')
            && color[1..].chars().all(|c| c.is_ascii_hexdigit());
        if !valid_color {
            return Err(Error::Precondition(format!(
                "color must be #rrggbb, got {color:?}"
            )));
        }
        Ok(PlotSeries {
            label: label.to_string(),
            angles,
            marker,
            color: color.to_string(),
        })
    }
}

/// A finished SVG document.
#[derive(Debug, Clone, PartialEq)]
pub struct SvgDoc {
    pub width: u32,
    pub height: u32,
    pub body: String,
}

impl SvgDoc {
    /// The complete document, including the root element.
    pub fn xml(&self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n{}</svg>\n",
            self.width, self.height, self.width, self.height, self.body
        )
    }
}

const MARGIN: f64 = 30.0;

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
        .replace('\'', "&apos;")
}

fn marker_svg(out: &mut String, marker: Marker, x: f64, y: f64, color: &str) {
    match marker {
        Marker::Circle => {
            let _ = writeln!(
                out,
                "<circle cx=\"{x:.4}\" cy=\"{y:.4}\" r=\"3\" fill=\"{color}\"/>"
            );
        }
        Marker::Cross => {
            let _ = writeln!(
                out,
                "<path d=\"M {:.4} {:.4} L {:.4} {:.4} M {:.4} {:.4} L {:.4} {:.4}\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
                x - 3.0, y - 3.0, x + 3.0, y + 3.0, x - 3.0, y + 3.0, x + 3.0, y - 3.0
            );
        }
        Marker::Box => {
            let _ = writeln!(
                out,
                "<rect x=\"{:.4}\" y=\"{:.4}\" width=\"5\" height=\"5\" fill=\"{color}\"/>",
                x - 2.5,
                y - 2.5
            );
        }
    }
}

fn legend_svg(out: &mut String, series: &[PlotSeries]) {
    for (k, s) in series.iter().enumerate() {
        let y = 14.0 + 16.0 * k as f64;
        marker_svg(out, s.marker, 12.0, y - 3.0, &s.color);
        let _ = writeln!(
            out,
            "<text x=\"22\" y=\"{y:.4}\" font-size=\"11\" font-family=\"sans-serif\">{}</text>",
            escape(&s.label)
        );
    }
}

fn zero_tick_svg(out: &mut String, cx: f64, cy: f64, radius: f64) {
    let _ = writeln!(
        out,
        "<line x1=\"{:.4}\" y1=\"{cy:.4}\" x2=\"{:.4}\" y2=\"{cy:.4}\" stroke=\"#444444\" stroke-width=\"1\"/>",
        cx + radius,
        cx + radius + 6.0
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.4}\" y=\"{:.4}\" font-size=\"11\" font-family=\"sans-serif\">0</text>",
        cx + radius + 8.0,
        cy + 4.0
    );
}

/// Circular scatter plot: `n` concentric guide circles with radius `i/n`, the
/// i-th angle of every series drawn on the i-th circle. All series must share
/// one length `n ≥ 1`. Later series are drawn on top of earlier ones.
pub fn circular_scatter_svg(series: &[PlotSeries], size: u32) -> Result<SvgDoc> {
    if series.is_empty() {
        return Err(Error::Precondition("at least one series required".into()));
    }
    let n = series[0].angles.len();
    if n == 0 {
        return Err(Error::Precondition("series must be nonempty".into()));
    }
    for s in series {
        if s.angles.len() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: s.angles.len(),
            });
        }
    }
    let center = size as f64 / 2.0;
    let radius = center - MARGIN;
    let mut body = String::new();
    for i in 1..=n {
        let r = radius * i as f64 / n as f64;
        let _ = writeln!(
            body,
            "<circle cx=\"{center:.4}\" cy=\"{center:.4}\" r=\"{r:.4}\" fill=\"none\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>"
        );
    }
    zero_tick_svg(&mut body, center, center, radius);
    for s in series {
        for (i, a) in s.angles.iter().enumerate() {
            let r = radius * (i + 1) as f64 / n as f64;
            let x = center + r * a.cos();
            let y = center - r * a.sin();
            marker_svg(&mut body, s.marker, x, y, &s.color);
        }
    }
    legend_svg(&mut body, series);
    Ok(SvgDoc {
        width: size,
        height: size,
        body,
    })
}

/// Spoke plot: observed angles on the outer ring, predicted angles on an
/// inner ring at 0.7 of the outer radius, one chord per pair.
pub fn spoke_plot_svg(observed: &[Angle], predicted: &[Angle], size: u32) -> Result<SvgDoc> {
    if observed.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: observed.len(),
            right: predicted.len(),
        });
    }
    if observed.is_empty() {
        return Err(Error::Precondition("spoke plot needs n >= 1".into()));
    }
    let center = size as f64 / 2.0;
    let outer = center - MARGIN;
    let inner = 0.7 * outer;
    let mut body = String::new();
    for r in [outer, inner] {
        let _ = writeln!(
            body,
            "<circle cx=\"{center:.4}\" cy=\"{center:.4}\" r=\"{r:.4}\" fill=\"none\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>"
        );
    }
    zero_tick_svg(&mut body, center, center, outer);
    let series = [
        PlotSeries::new("observed", observed.to_vec(), Marker::Circle, "#1f5fa8")?,
        PlotSeries::new("predicted", predicted.to_vec(), Marker::Cross, "#c23b22")?,
    ];
    for (o, p) in observed.iter().zip(predicted) {
        let x1 = center + outer * o.cos();
        let y1 = center - outer * o.sin();
        let x2 = center + inner * p.cos();
        let y2 = center - inner * p.sin();
        let _ = writeln!(
            body,
            "<line x1=\"{x1:.4}\" y1=\"{y1:.4}\" x2=\"{x2:.4}\" y2=\"{y2:.4}\" stroke=\"#999999\" stroke-width=\"0.7\"/>"
        );
    }
    for o in observed {
        marker_svg(
            &mut body,
            Marker::Circle,
            center + outer * o.cos(),
            center - outer * o.sin(),
            "#1f5fa8",
        );
    }
    for p in predicted {
        marker_svg(
            &mut body,
            Marker::Cross,
            center + inner * p.cos(),
            center - inner * p.sin(),
            "#c23b22",
        );
    }
    legend_svg(&mut body, &series);
    Ok(SvgDoc {
        width: size,
        height: size,
        body,
    })
}

/// QQ scatter of rank-paired angles (radians on both axes) with the identity
/// reference line.
pub fn qq_plot_svg(pairs: &[(f64, f64)], size: u32) -> Result<SvgDoc> {
    if pairs.is_empty() {
        return Err(Error::Precondition("QQ plot needs n >= 1".into()));
    }
    let span = size as f64 - 2.0 * MARGIN;
    let scale = span / std::f64::consts::TAU;
    let to_px = |v: f64| MARGIN + v * scale;
    let mut body = String::new();
    let _ = writeln!(
        body,
        "<rect x=\"{MARGIN:.4}\" y=\"{MARGIN:.4}\" width=\"{span:.4}\" height=\"{span:.4}\" fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"0.7\"/>"
    );
    let _ = writeln!(
        body,
        "<line x1=\"{:.4}\" y1=\"{:.4}\" x2=\"{:.4}\" y2=\"{:.4}\" stroke=\"#999999\" stroke-width=\"0.7\" stroke-dasharray=\"4 3\"/>",
        to_px(0.0),
        size as f64 - to_px(0.0),
        to_px(std::f64::consts::TAU),
        size as f64 - to_px(std::f64::consts::TAU)
    );
    for &(x, y) in pairs {
        marker_svg(
            &mut body,
            Marker::Circle,
            to_px(x),
            size as f64 - to_px(y),
            "#1f5fa8",
        );
    }
    Ok(SvgDoc {
        width: size,
        height: size,
        body,
    })
}
