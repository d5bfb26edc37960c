//! Output records and writers. Every command emits either CSV or JSON built
//! from the same typed rows, so the two formats carry identical data and the
//! JSON can be parsed back into the row types unchanged.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::CliError;

/// One coefficient of a single fit, reported on both scales. Intercept rows
/// use the covariate name "(intercept)" and leave the standardized value
/// empty, since the standardized design is centered and has none.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    /// 1-based model index.
    pub model: usize,
    pub covariate: String,
    pub standardized: Option<f64>,
    pub raw: f64,
}

/// A single fit with its tuning summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub lambda: f64,
    pub omega: f64,
    pub max_similarity: f64,
    pub converged: bool,
    pub rows: Vec<FitRow>,
}

/// One (lambda, model, covariate) cell of a regularization path, in the long
/// format plotting tools consume directly. Coefficients are on the
/// standardized scale; `sse` is the model's squared error on that scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRow {
    pub lambda: f64,
    pub omega: f64,
    /// 1-based model index.
    pub model: usize,
    pub covariate: String,
    pub coefficient: f64,
    pub sse: f64,
    pub max_similarity: f64,
    pub converged: bool,
    pub omega_capped: bool,
}

/// One entry of a pairwise or per-model diagnostic. Pairwise metrics carry
/// both 1-based model indices; per-model metrics leave `model_j` empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub metric: String,
    pub model_i: usize,
    pub model_j: Option<usize>,
    pub value: f64,
}

/// One grid cell of a penalty or penalty-plus-SSE surface over the second
/// model's coefficient plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceRow {
    pub beta21: f64,
    pub beta22: f64,
    pub penalty: f64,
    /// Present only when a dataset was supplied for the error overlay.
    pub sse: Option<f64>,
}

/// Inclusion proportions over replicates, in aligned-model rows plus an
/// alignment-free union row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionReport {
    pub covariates: Vec<String>,
    /// One row per aligned model, same column order as `covariates`.
    pub proportions: Vec<Vec<f64>>,
    /// Fraction of replicates in which any model used each covariate.
    pub union_proportions: Vec<f64>,
    pub replicates: usize,
    pub zero_tol: f64,
    pub lambdas: Vec<f64>,
    pub omegas: Vec<f64>,
    pub capped_replicates: usize,
    pub nonconverged_replicates: usize,
}

/// Simulated data as column names plus rows of covariate values with the
/// response appended last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub covariates: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Where a command writes its payload: a file when --out is given, stdout
/// otherwise.
pub fn open_sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|e| {
                CliError::Data(format!("cannot create {}: {e}", path.display()))
            })?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn io_error(e: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("cannot write output: {e}"))
}

/// Render a float the way Rust's shortest round-trip formatting does; the
/// representation is deterministic and parses back to the identical bits.
fn cell(v: f64) -> String {
    format!("{v}")
}

fn optional_cell(v: Option<f64>) -> String {
    v.map(cell).unwrap_or_default()
}

pub fn write_json<T: Serialize>(sink: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *sink, value)
        .map_err(|e| CliError::Data(format!("cannot serialize output: {e}")))?;
    sink.write_all(b"\n").map_err(io_error)?;
    sink.flush().map_err(io_error)
}

pub fn write_fit_csv(sink: &mut dyn Write, report: &FitReport) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_writer(sink);
    writer
        .write_record(["model", "covariate", "standardized", "raw"])
        .map_err(io_error)?;
    for row in &report.rows {
        writer
            .write_record([
                row.model.to_string(),
                row.covariate.clone(),
                optional_cell(row.standardized),
                cell(row.raw),
            ])
            .map_err(io_error)?;
    }
    writer.flush().map_err(io_error)
}

pub fn write_path_csv(sink: &mut dyn Write, rows: &[PathRow]) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_writer(sink);
    writer
        .write_record([
            "lambda",
            "omega",
            "model",
            "covariate",
            "coefficient",
            "sse",
            "max_similarity",
            "converged",
            "omega_capped",
        ])
        .map_err(io_error)?;
    for row in rows {
        writer
            .write_record([
                cell(row.lambda),
                cell(row.omega),
                row.model.to_string(),
                row.covariate.clone(),
                cell(row.coefficient),
                cell(row.sse),
                cell(row.max_similarity),
                row.converged.to_string(),
                row.omega_capped.to_string(),
            ])
            .map_err(io_error)?;
    }
    writer.flush().map_err(io_error)
}

pub fn write_metrics_csv(sink: &mut dyn Write, rows: &[MetricRow]) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_writer(sink);
    writer
        .write_record(["metric", "model_i", "model_j", "value"])
        .map_err(io_error)?;
    for row in rows {
        writer
            .write_record([
                row.metric.clone(),
                row.model_i.to_string(),
                row.model_j.map(|j| j.to_string()).unwrap_or_default(),
                cell(row.value),
            ])
            .map_err(io_error)?;
    }
    writer.flush().map_err(io_error)
}

pub fn write_surface_csv(sink: &mut dyn Write, rows: &[SurfaceRow]) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_writer(sink);
    writer
        .write_record(["beta21", "beta22", "penalty", "sse"])
        .map_err(io_error)?;
    for row in rows {
        writer
            .write_record([
                cell(row.beta21),
                cell(row.beta22),
                cell(row.penalty),
                optional_cell(row.sse),
            ])
            .map_err(io_error)?;
    }
    writer.flush().map_err(io_error)
}

/// Wide table: one row per aligned model (1-based label) plus a final "any"
/// row with the union proportions.
pub fn write_inclusion_csv(sink: &mut dyn Write, report: &InclusionReport) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_writer(sink);
    let mut header = vec!["model".to_string()];
    header.extend(report.covariates.iter().cloned());
    writer.write_record(&header).map_err(io_error)?;
    for (m, row) in report.proportions.iter().enumerate() {
        let mut record = vec![(m + 1).to_string()];
        record.extend(row.iter().map(|&v| cell(v)));
        writer.write_record(&record).map_err(io_error)?;
    }
    let mut union = vec!["any".to_string()];
    union.extend(report.union_proportions.iter().map(|&v| cell(v)));
    writer.write_record(&union).map_err(io_error)?;
    writer.flush().map_err(io_error)
}

pub fn write_simulate_csv(sink: &mut dyn Write, report: &SimulateReport) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_writer(sink);
    let mut header = report.covariates.clone();
    header.push("y".to_string());
    writer.write_record(&header).map_err(io_error)?;
    for row in &report.rows {
        writer
            .write_record(row.iter().map(|&v| cell(v)))
            .map_err(io_error)?;
    }
    writer.flush().map_err(io_error)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_cells_round_trip_exactly() {
        for &v in &[0.1, 1.0 / 3.0, 1e-300, -2.5e17, 14.8] {
            let parsed: f64 = cell(v).parse().unwrap();
            assert_eq!(parsed.to_bits(), v.to_bits());
        }
    }

    #[test]
    fn path_rows_round_trip_through_json() {
        let rows = vec![
            PathRow {
                lambda: 2.5,
                omega: 0.125,
                model: 1,
                covariate: "x1".into(),
                coefficient: -0.75,
                sse: 12.5,
                max_similarity: 0.25,
                converged: true,
                omega_capped: false,
            },
            PathRow {
                lambda: 1.25,
                omega: 0.0,
                model: 2,
                covariate: "x2".into(),
                coefficient: 0.0,
                sse: 13.0,
                max_similarity: 0.0,
                converged: true,
                omega_capped: false,
            },
        ];
        let mut buffer = Vec::new();
        write_json(&mut buffer, &rows).unwrap();
        let back: Vec<PathRow> = serde_json::from_slice(&buffer).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn fit_csv_leaves_missing_standardized_cells_empty() {
        let report = FitReport {
            lambda: 1.0,
            omega: 0.5,
            max_similarity: 0.1,
            converged: true,
            rows: vec![
                FitRow {
                    model: 1,
                    covariate: "x1".into(),
                    standardized: Some(0.5),
                    raw: 2.0,
                },
                FitRow {
                    model: 1,
                    covariate: "(intercept)".into(),
                    standardized: None,
                    raw: 3.5,
                },
            ],
        };
        let mut buffer = Vec::new();
        write_fit_csv(&mut buffer, &report).unwrap();
        let text = String::from_utf8(buffer).unwrap();
        assert!(text.contains("1,(intercept),,3.5"));
    }
}
