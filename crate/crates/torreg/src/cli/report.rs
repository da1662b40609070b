//! Plain-text report files with stable `key = value` fields.
//!
//! Reports are byte-deterministic for a fixed seed: they never contain
//! timestamps or timings. Floats use the shortest round-trip formatting, so a
//! fit report feeds `predict` without precision loss.

use std::path::Path;

use crate::error::{Error, Result};
use crate::estimation::{BootstrapSummary, FitResult, McSummary};
use crate::mobius::ModelParams;

pub const FIT_REPORT_HEADER: &str = "torreg fit report v1";
pub const PARAM_KEYS: [&str; 6] = ["phi0", "b1", "b2", "b3", "b4", "theta0"];

pub fn render_fit_report(
    result: &FitResult,
    bootstrap: Option<&BootstrapSummary>,
    n: usize,
    seed: u64,
    unit_name: &str,
) -> String {
    let mut out = String::new();
    out.push_str(FIT_REPORT_HEADER);
    out.push('\n');
    out.push_str(&format!("n = {n}\n"));
    out.push_str(&format!("seed = {seed}\n"));
    out.push_str(&format!("unit = {unit_name}\n"));
    out.push_str(&format!("restarts = {}\n", result.starts.len()));
    out.push_str(&format!("loss = {}\n", result.loss));
    let converged = result.starts.iter().filter(|s| s.converged).count();
    out.push_str(&format!("converged_starts = {converged}\n"));
    let v = result.params.to_array();
    for (key, value) in PARAM_KEYS.iter().zip(v) {
        out.push_str(&format!("{key} = {value}\n"));
    }
    if let Some(b) = bootstrap {
        for (key, se) in PARAM_KEYS.iter().zip(b.se) {
            out.push_str(&format!("se_{key} = {se}\n"));
        }
        out.push_str(&format!("bootstrap_replicates = {}\n", b.replicates));
        out.push_str(&format!("bootstrap_failures = {}\n", b.failures));
    }
    out.push_str("[starts]\n");
    out.push_str("# index loss iterations converged\n");
    for (i, s) in result.starts.iter().enumerate() {
        out.push_str(&format!(
            "{i} {} {} {}\n",
            s.loss, s.iterations, s.converged
        ));
    }
    out
}

/// Reads the parameter vector (and loss) back out of a fit report.
pub fn parse_fit_report(path: &Path) -> Result<(ModelParams, f64)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(first) if first.trim() == FIT_REPORT_HEADER => {}
        other => {
            return Err(Error::Parse(format!(
                "{}: not a fit report (first line {:?})",
                path.display(),
                other.unwrap_or("")
            )))
        }
    }
    let mut values = [f64::NAN; 6];
    let mut loss = f64::NAN;
    for line in lines {
        if line.trim() == "[starts]" {
            break;
        }
        let Some((key, value)) = line.split_once('=') else {
            continue;
        };
        let key = key.trim();
        let value = value.trim();
        if key == "loss" {
            loss = value
                .parse()
                .map_err(|_| Error::Parse(format!("{}: bad loss {value:?}", path.display())))?;
        } else if let Some(idx) = PARAM_KEYS.iter().position(|k| *k == key) {
            values[idx] = value.parse().map_err(|_| {
                Error::Parse(format!("{}: bad value {value:?} for {key}", path.display()))
            })?;
        }
    }
    for (key, v) in PARAM_KEYS.iter().zip(values) {
        if v.is_nan() {
            return Err(Error::Parse(format!(
                "{}: missing parameter {key}",
                path.display()
            )));
        }
    }
    Ok((ModelParams::from_array(values), loss))
}

pub const MC_REPORT_HEADER: &str = "torreg mc-study report v1";

/// One row of the recovery-study table: `mean (sd / se)` per parameter.
pub fn render_mc_row(n: usize, errors_spec: &str, summary: &McSummary) -> String {
    let mut cells = Vec::with_capacity(6);
    for coord in 0..6 {
        cells.push(format!(
            "{:.4} ({:.4} / {:.4})",
            summary.mean[coord], summary.sd[coord], summary.se_mean[coord]
        ));
    }
    format!(
        "n={n} errors={errors_spec} failures={} | {}\n",
        summary.failures,
        cells.join(" | ")
    )
}
