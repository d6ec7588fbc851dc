//! Loading time series from delimited text files and preparing them for
//! analysis.
//!
//! Malformed rows are dropped and counted, never interpolated: filling gaps
//! would inject short-scale correlations into the very statistics the
//! estimators measure. Timestamps, when present, are ignored for gridding;
//! the series is treated as uniformly sampled at its declared tick lag.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{TickLag, TimeSeries};

/// Which column of a delimited file holds the values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnSelector {
    Name(String),
    Index(usize),
}

impl std::fmt::Display for ColumnSelector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ColumnSelector::Name(n) => f.write_str(n),
            ColumnSelector::Index(i) => write!(f, "#{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub column: ColumnSelector,
    pub timestamp_column: Option<ColumnSelector>,
    pub delimiter: char,
    pub has_header: bool,
}

impl Default for ColumnSpec {
    fn default() -> Self {
        Self {
            column: ColumnSelector::Index(0),
            timestamp_column: None,
            delimiter: ',',
            has_header: true,
        }
    }
}

/// A parsed series plus how many rows were dropped on the way in.
#[derive(Debug, Clone)]
pub struct LoadedSeries {
    pub series: TimeSeries,
    pub dropped_rows: usize,
}

/// Reads the selected column of a delimited UTF-8 text file, in file order.
/// Rows whose value cell is missing or fails to parse as a float are dropped
/// and counted in the result.
pub fn load_series(path: &Path, spec: &ColumnSpec, tick_lag: TickLag) -> Result<LoadedSeries> {
    if !spec.delimiter.is_ascii() || spec.delimiter.is_ascii_control() {
        return Err(Error::InvalidParameter {
            name: "delimiter",
            reason: format!(
                "must be a single printable ASCII character, got {:?}",
                spec.delimiter
            ),
        });
    }

    let mut reader = csv::ReaderBuilder::new()
        .delimiter(spec.delimiter as u8)
        .has_headers(spec.has_header)
        .flexible(true)
        .from_path(path)?;

    let column_index = match &spec.column {
        ColumnSelector::Index(i) => *i,
        ColumnSelector::Name(name) => {
            if !spec.has_header {
                return Err(Error::MissingColumn(format!(
                    "{name} (column names require a header row)"
                )));
            }
            reader
                .headers()?
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| Error::MissingColumn(name.clone()))?
        }
    };

    let mut values = Vec::new();
    let mut dropped = 0usize;
    let mut saw_column = false;
    for record in reader.records() {
        let record = record?;
        match record.get(column_index) {
            Some(cell) => {
                saw_column = true;
                match cell.trim().parse::<f64>() {
                    Ok(v) if v.is_finite() => values.push(v),
                    _ => dropped += 1,
                }
            }
            None => dropped += 1,
        }
    }

    if !saw_column && dropped > 0 {
        return Err(Error::MissingColumn(spec.column.to_string()));
    }
    if values.len() < crate::series::MIN_SERIES_LEN {
        return Err(Error::SeriesTooShort {
            len: values.len(),
            min: crate::series::MIN_SERIES_LEN,
        });
    }

    let label = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(LoadedSeries {
        series: TimeSeries::new(values, tick_lag, label)?,
        dropped_rows: dropped,
    })
}

/// How a raw series is turned into an increment series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IncrementMode {
    /// y_i = x_{i+1} - x_i
    Diff,
    /// y_i = ln(x_{i+1} / x_i); requires strictly positive input.
    LogReturn,
    /// Diff minus its own sample mean.
    DemeanedDiff,
}

impl std::fmt::Display for IncrementMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            IncrementMode::Diff => "diff",
            IncrementMode::LogReturn => "log_return",
            IncrementMode::DemeanedDiff => "demeaned_diff",
        };
        f.write_str(s)
    }
}

/// Converts a level series into increments; output has length N-1 and keeps
/// the input's tick lag.
pub fn to_increments(series: &TimeSeries, mode: IncrementMode) -> Result<TimeSeries> {
    let x = series.values();
    if x.len() < 17 {
        return Err(Error::SeriesTooShort {
            len: x.len(),
            min: 17,
        });
    }
    let diffs = || x.windows(2).map(|w| w[1] - w[0]);
    let values: Vec<f64> = match mode {
        IncrementMode::Diff => diffs().collect(),
        IncrementMode::LogReturn => {
            if let Some(index) = x.iter().position(|&v| v <= 0.0) {
                return Err(Error::NonPositiveLogReturn { index });
            }
            x.windows(2).map(|w| (w[1] / w[0]).ln()).collect()
        }
        IncrementMode::DemeanedDiff => {
            let d: Vec<f64> = diffs().collect();
            let mean = d.iter().sum::<f64>() / d.len() as f64;
            d.into_iter().map(|v| v - mean).collect()
        }
    };
    TimeSeries::new(values, series.tick_lag.clone(), series.label.clone())
}
