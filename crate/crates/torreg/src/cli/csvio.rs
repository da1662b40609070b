//! CSV ingestion and emission for torus datasets.
//!
//! The schema is a header row with the four direction columns `cov_phi`,
//! `cov_theta`, `resp_phi`, `resp_theta` in any order, plus an optional
//! `timestamp` column carried through as row labels. Directions default to
//! degrees (wrapped into `[0, 360)` on input); radians are opt-in.

use std::path::Path;

use clap::ValueEnum;

use crate::error::{Error, Result};
use crate::geometry::{Angle, TorusPoint};
use crate::model::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AngleUnit {
    Degrees,
    Radians,
}

impl AngleUnit {
    pub fn parse_angle(self, cell: &str) -> Option<Angle> {
        let value: f64 = cell.trim().parse().ok()?;
        if !value.is_finite() {
            return None;
        }
        Some(match self {
            AngleUnit::Degrees => Angle::from_degrees(value),
            AngleUnit::Radians => Angle::new(value),
        })
    }

    pub fn format_angle(self, angle: Angle) -> String {
        match self {
            AngleUnit::Degrees => format!("{}", angle.degrees()),
            AngleUnit::Radians => format!("{}", angle.radians()),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AngleUnit::Degrees => "degrees",
            AngleUnit::Radians => "radians",
        }
    }
}

impl std::str::FromStr for AngleUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "degrees" => Ok(AngleUnit::Degrees),
            "radians" => Ok(AngleUnit::Radians),
            other => Err(Error::Parse(format!(
                "unknown unit {other:?} (expected degrees or radians)"
            ))),
        }
    }
}

pub const COVARIATE_COLUMNS: [&str; 2] = ["cov_phi", "cov_theta"];
pub const RESPONSE_COLUMNS: [&str; 2] = ["resp_phi", "resp_theta"];
pub const TIMESTAMP_COLUMN: &str = "timestamp";

struct HeaderMap {
    indices: Vec<usize>,
    timestamp: Option<usize>,
}

fn map_header(path: &Path, headers: &csv::StringRecord, columns: &[&str]) -> Result<HeaderMap> {
    let mut indices = Vec::with_capacity(columns.len());
    for col in columns {
        let idx = headers
            .iter()
            .position(|h| h.trim() == *col)
            .ok_or_else(|| {
                Error::Parse(format!("{}: column {col} not found", path.display()))
            })?;
        indices.push(idx);
    }
    let timestamp = headers.iter().position(|h| h.trim() == TIMESTAMP_COLUMN);
    Ok(HeaderMap { indices, timestamp })
}

fn parse_cell(
    path: &Path,
    record: &csv::StringRecord,
    row: usize,
    col_idx: usize,
    col_name: &str,
    unit: AngleUnit,
) -> Result<Angle> {
    let cell = record.get(col_idx).ok_or_else(|| {
        Error::Parse(format!(
            "{}: row {row} has no value for column {col_name}",
            path.display()
        ))
    })?;
    unit.parse_angle(cell).ok_or_else(|| {
        Error::Parse(format!(
            "{}: row {row}, column {col_name}: {cell:?} is not a finite number",
            path.display()
        ))
    })
}

fn read_records(path: &Path) -> Result<(csv::StringRecord, Vec<csv::StringRecord>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
        .clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::Parse(format!(
            "{}: empty file (header row required)",
            path.display()
        )));
    }
    let records = reader
        .records()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok((headers, records))
}

/// Loads a full covariate/response dataset.
pub fn load_dataset(path: &Path, unit: AngleUnit) -> Result<Dataset> {
    let (headers, records) = read_records(path)?;
    let all_columns = [
        COVARIATE_COLUMNS[0],
        COVARIATE_COLUMNS[1],
        RESPONSE_COLUMNS[0],
        RESPONSE_COLUMNS[1],
    ];
    let map = map_header(path, &headers, &all_columns)?;
    let mut rows = Vec::with_capacity(records.len());
    let mut labels = Vec::new();
    for (i, record) in records.iter().enumerate() {
        let row = i + 2; // 1-based, after the header
        let mut angles = [Angle::ZERO; 4];
        for (k, (&idx, name)) in map.indices.iter().zip(all_columns).enumerate() {
            angles[k] = parse_cell(path, record, row, idx, name, unit)?;
        }
        rows.push((
            TorusPoint::new(angles[0], angles[1]),
            TorusPoint::new(angles[2], angles[3]),
        ));
        if let Some(ts) = map.timestamp {
            labels.push(record.get(ts).unwrap_or("").to_string());
        }
    }
    if map.timestamp.is_some() {
        Dataset::with_labels(rows, labels)
    } else {
        Ok(Dataset::new(rows))
    }
}

/// Loads a covariate-only file (`cov_phi`, `cov_theta`, optional timestamp).
pub fn load_covariates(path: &Path, unit: AngleUnit) -> Result<(Vec<TorusPoint>, Vec<String>)> {
    let (headers, records) = read_records(path)?;
    let map = map_header(path, &headers, &COVARIATE_COLUMNS)?;
    let mut points = Vec::with_capacity(records.len());
    let mut labels = Vec::new();
    for (i, record) in records.iter().enumerate() {
        let row = i + 2;
        let phi = parse_cell(path, record, row, map.indices[0], COVARIATE_COLUMNS[0], unit)?;
        let theta = parse_cell(path, record, row, map.indices[1], COVARIATE_COLUMNS[1], unit)?;
        points.push(TorusPoint::new(phi, theta));
        if let Some(ts) = map.timestamp {
            labels.push(record.get(ts).unwrap_or("").to_string());
        }
    }
    Ok((points, labels))
}

/// Writes a dataset with the standard header; timestamps lead when present.
pub fn write_dataset(path: &Path, data: &Dataset, unit: AngleUnit) -> Result<()> {
    let mut out = String::new();
    let labelled = data.labels().is_some();
    if labelled {
        out.push_str("timestamp,");
    }
    out.push_str("cov_phi,cov_theta,resp_phi,resp_theta\n");
    for (i, (cov, resp)) in data.rows().iter().enumerate() {
        if let Some(labels) = data.labels() {
            out.push_str(&labels[i]);
            out.push(',');
        }
        out.push_str(&format!(
            "{},{},{},{}\n",
            unit.format_angle(cov.phi),
            unit.format_angle(cov.theta),
            unit.format_angle(resp.phi),
            unit.format_angle(resp.theta),
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Writes predictions (`pred_phi`, `pred_theta`) with optional leading
/// timestamps.
pub fn write_predictions(
    path: &Path,
    predictions: &[TorusPoint],
    labels: &[String],
    unit: AngleUnit,
) -> Result<()> {
    let mut out = String::new();
    let labelled = !labels.is_empty();
    if labelled {
        out.push_str("timestamp,");
    }
    out.push_str("pred_phi,pred_theta\n");
    for (i, p) in predictions.iter().enumerate() {
        if labelled {
            out.push_str(&labels[i]);
            out.push(',');
        }
        out.push_str(&format!(
            "{},{}\n",
            unit.format_angle(p.phi),
            unit.format_angle(p.theta)
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn write_tmp(name: &str, contents: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("torreg-csv-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        std::fs::write(&path, contents).unwrap();
        path
    }

    #[test]
    fn degrees_convert_and_wrap() {
        let path = write_tmp(
            "basic.csv",
            "cov_phi,cov_theta,resp_phi,resp_theta\n90,360,45,180\n",
        );
        let data = load_dataset(&path, AngleUnit::Degrees).unwrap();
        assert_eq!(data.len(), 1);
        let (cov, resp) = data.rows()[0];
        assert_abs_diff_eq!(cov.phi.radians(), FRAC_PI_2, epsilon = 1e-12);
        assert_abs_diff_eq!(cov.theta.radians(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(resp.phi.degrees(), 45.0, epsilon = 1e-9);
        assert_abs_diff_eq!(resp.theta.degrees(), 180.0, epsilon = 1e-9);
    }

    #[test]
    fn missing_column_is_named() {
        let path = write_tmp("missing.csv", "cov_phi,cov_theta,resp_phi\n1,2,3\n");
        let err = load_dataset(&path, AngleUnit::Degrees).unwrap_err();
        assert!(err.to_string().contains("column resp_theta not found"), "{err}");
    }

    #[test]
    fn bad_cell_names_row_and_column() {
        let path = write_tmp(
            "bad_cell.csv",
            "cov_phi,cov_theta,resp_phi,resp_theta\n1,2,3,4\n1,frog,3,4\n",
        );
        let err = load_dataset(&path, AngleUnit::Degrees).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 3") && msg.contains("cov_theta"), "{msg}");
    }

    #[test]
    fn empty_file_is_rejected() {
        let path = write_tmp("empty.csv", "");
        assert!(load_dataset(&path, AngleUnit::Degrees).is_err());
    }

    #[test]
    fn timestamps_become_labels_and_round_trip() {
        let path = write_tmp(
            "ts.csv",
            "timestamp,cov_phi,cov_theta,resp_phi,resp_theta\n2023-06-01T06:00,10,20,30,40\n",
        );
        let data = load_dataset(&path, AngleUnit::Degrees).unwrap();
        assert_eq!(data.labels().unwrap()[0], "2023-06-01T06:00");

        let out = write_tmp("ts_out.csv", "");
        write_dataset(&out, &data, AngleUnit::Degrees).unwrap();
        let reread = load_dataset(&out, AngleUnit::Degrees).unwrap();
        assert_eq!(reread.labels().unwrap()[0], "2023-06-01T06:00");
        for (a, b) in data.rows().iter().zip(reread.rows()) {
            assert_abs_diff_eq!(a.0.phi.radians(), b.0.phi.radians(), epsilon = 1e-9);
            assert_abs_diff_eq!(a.1.theta.radians(), b.1.theta.radians(), epsilon = 1e-9);
        }
    }

    #[test]
    fn covariate_only_load() {
        let path = write_tmp("cov.csv", "cov_phi,cov_theta\n0.5,1.5\n");
        let (pts, labels) = load_covariates(&path, AngleUnit::Radians).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(labels.is_empty());
        assert_abs_diff_eq!(pts[0].phi.radians(), 0.5, epsilon = 1e-15);
    }
}
