//! The time-series data model and CSV ingestion.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// An ordered sequence of finite real observations, optionally labelled.
///
/// Labels are carried through untouched (they are never interpreted as
/// timestamps); when present they must be strictly increasing and match
/// the value count.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    labels: Option<Vec<f64>>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite value at index {pos}"
            )));
        }
        Ok(Self {
            values,
            labels: None,
        })
    }

    pub fn with_labels(values: Vec<f64>, labels: Vec<f64>) -> Result<Self> {
        let series = Self::new(values)?;
        if labels.len() != series.len() {
            return Err(Error::LengthMismatch {
                left: series.len(),
                right: labels.len(),
            });
        }
        if labels.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "labels must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            labels: Some(labels),
            ..series
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> Option<&[f64]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn last(&self) -> f64 {
        *self.values.last().expect("series is non-empty")
    }

    /// A new series over the first `n` observations (labels dropped).
    pub fn prefix(&self, n: usize) -> Result<Self> {
        Self::new(self.values[..n.min(self.len())].to_vec())
    }
}

/// Which column of a CSV file to read.
#[derive(Debug, Clone, Default)]
pub enum ColumnSelector {
    /// The last column of each record.
    #[default]
    Last,
    Index(usize),
    Name(String),
}

impl ColumnSelector {
    pub fn parse(spec: &str) -> Self {
        match spec.parse::<usize>() {
            Ok(idx) => ColumnSelector::Index(idx),
            Err(_) => ColumnSelector::Name(spec.to_string()),
        }
    }
}

/// Reads one value column from a CSV file.
///
/// A header row is auto-detected: if the first row's value cell does not
/// parse as a number, the row is treated as a header. Gaps and non-numeric
/// cells are rejected with a `Parse` error (1-based row/column) rather
/// than imputed.
pub fn load_csv(path: impl AsRef<Path>, column: Option<&ColumnSelector>) -> Result<TimeSeries> {
    let default = ColumnSelector::Last;
    let column = column.unwrap_or(&default);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path.as_ref())
        .map_err(csv_to_error)?;

    let mut records = Vec::new();
    for record in reader.records() {
        records.push(record.map_err(csv_to_error)?);
    }
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }

    let col_index = |record: &csv::StringRecord| -> Result<usize> {
        match column {
            ColumnSelector::Last => Ok(record.len().saturating_sub(1)),
            ColumnSelector::Index(i) => Ok(*i),
            ColumnSelector::Name(name) => {
                // Resolved against the first row, which must then be a header.
                records[0]
                    .iter()
                    .position(|cell| cell.trim() == name)
                    .ok_or_else(|| Error::InvalidInput(format!("no column named {name:?}")))
            }
        }
    };

    let first_col = col_index(&records[0])?;
    let first_cell = records[0].get(first_col).unwrap_or("").trim();
    let has_header =
        matches!(column, ColumnSelector::Name(_)) || first_cell.parse::<f64>().is_err();

    let mut values = Vec::with_capacity(records.len());
    for (row_idx, record) in records.iter().enumerate() {
        if has_header && row_idx == 0 {
            continue;
        }
        let col = col_index(record)?;
        let cell = record.get(col).map(str::trim).unwrap_or("");
        let value: f64 = cell.parse().map_err(|_| Error::Parse {
            row: row_idx + 1,
            column: col + 1,
            message: format!("{cell:?} is not a number"),
        })?;
        if !value.is_finite() {
            return Err(Error::Parse {
                row: row_idx + 1,
                column: col + 1,
                message: "non-finite value".into(),
            });
        }
        values.push(value);
    }
    TimeSeries::new(values)
}

/// Writes values one per line, full round-trip precision.
pub fn save_csv(series: &TimeSeries, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    for v in series.values() {
        writeln!(out, "{v}").expect("writing to string cannot fail");
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn csv_to_error(err: csv::Error) -> Error {
    match err.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidInput(format!("csv error: {other:?}")),
    }
}
