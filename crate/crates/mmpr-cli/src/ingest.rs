//! CSV data ingestion: header-driven column naming, strict numeric parsing,
//! and an opt-in convention that empty cells mean zero.

use std::path::Path;

use mmpr::Dataset;
use ndarray::{Array1, Array2};

use crate::CliError;

/// A parsed dataset plus ingestion bookkeeping.
#[derive(Debug)]
pub struct IngestReport {
    pub dataset: Dataset,
    /// Number of empty cells replaced by zero (always 0 unless filling was
    /// requested).
    pub filled: usize,
}

/// Read a headered CSV file into a dataset, taking `response` as y and every
/// other column, in file order, as a covariate. Empty cells are an error
/// naming the offending row and column unless `fill_zero` is set, in which
/// case they become 0 and are counted. Row numbers in errors are 1-based
/// over data rows (the header is not counted).
pub fn ingest_csv(path: &Path, response: &str, fill_zero: bool) -> Result<IngestReport, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::Data(format!("cannot parse header of {}: {e}", path.display())))?
        .clone();
    let response_index = headers
        .iter()
        .position(|h| h == response)
        .ok_or_else(|| {
            CliError::Data(format!(
                "response column {response:?} not found; file has columns {:?}",
                headers.iter().collect::<Vec<_>>()
            ))
        })?;
    let names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(c, _)| c != response_index)
        .map(|(_, h)| h.to_string())
        .collect();
    if names.is_empty() {
        return Err(CliError::Data(format!(
            "{} has no covariate columns besides the response",
            path.display()
        )));
    }

    let mut filled = 0usize;
    let mut x_cells: Vec<f64> = Vec::new();
    let mut y_cells: Vec<f64> = Vec::new();
    for (row_index, record) in reader.records().enumerate() {
        let row = row_index + 1;
        let record =
            record.map_err(|e| CliError::Data(format!("cannot parse data row {row}: {e}")))?;
        if record.len() != headers.len() {
            return Err(CliError::Data(format!(
                "data row {row} has {} fields, expected {}",
                record.len(),
                headers.len()
            )));
        }
        for (c, cell) in record.iter().enumerate() {
            let value = if cell.is_empty() {
                if !fill_zero {
                    return Err(CliError::Data(format!(
                        "missing value at data row {row}, column {:?} \
                         (pass --fill-missing-zero to treat empty cells as 0)",
                        &headers[c]
                    )));
                }
                filled += 1;
                0.0
            } else {
                cell.parse::<f64>().map_err(|_| {
                    CliError::Data(format!(
                        "non-numeric cell at data row {row}, column {:?}: {cell:?}",
                        &headers[c]
                    ))
                })?
            };
            if c == response_index {
                y_cells.push(value);
            } else {
                x_cells.push(value);
            }
        }
    }

    let n = y_cells.len();
    let p = names.len();
    let x = Array2::from_shape_vec((n, p), x_cells)
        .map_err(|e| CliError::Data(format!("inconsistent row lengths: {e}")))?;
    let y = Array1::from_vec(y_cells);
    let dataset = Dataset::new(x, y, names)?;
    Ok(IngestReport { dataset, filled })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(content.as_bytes()).unwrap();
        file.flush().unwrap();
        file
    }

    #[test]
    fn parses_headered_file_preserving_column_order() {
        let file = write_temp("a,y,b\n1,10,2\n3,20,4\n5,30,6\n");
        let report = ingest_csv(file.path(), "y", false).unwrap();
        assert_eq!(report.filled, 0);
        assert_eq!(report.dataset.names(), ["a", "b"]);
        assert_eq!(report.dataset.n(), 3);
        assert_eq!(report.dataset.x()[[1, 0]], 3.0);
        assert_eq!(report.dataset.x()[[1, 1]], 4.0);
        assert_eq!(report.dataset.y()[2], 30.0);
    }

    #[test]
    fn empty_cell_errors_unless_filling_is_on() {
        let file = write_temp("a,b,y\n1,2,3\n4,,6\n7,8,9\n");
        let err = ingest_csv(file.path(), "y", false).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let message = err.to_string();
        assert!(message.contains("row 2"), "unexpected message: {message}");
        assert!(message.contains("\"b\""), "unexpected message: {message}");

        let report = ingest_csv(file.path(), "y", true).unwrap();
        assert_eq!(report.filled, 1);
        assert_eq!(report.dataset.x()[[1, 1]], 0.0);
    }

    #[test]
    fn non_numeric_cell_names_row_and_column() {
        let file = write_temp("a,y\n1,2\noops,4\n");
        let err = ingest_csv(file.path(), "y", false).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let message = err.to_string();
        assert!(message.contains("row 2") && message.contains("\"a\""));
        assert!(message.contains("oops"));
    }

    #[test]
    fn missing_response_column_is_a_data_error() {
        let file = write_temp("a,b\n1,2\n");
        let err = ingest_csv(file.path(), "z", false).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("\"z\""));
    }
}
