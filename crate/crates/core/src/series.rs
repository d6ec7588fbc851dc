//! Shared domain types: time series and the q/scale grids the estimators
//! are evaluated on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of samples any estimator will accept.
pub const MIN_SERIES_LEN: usize = 16;

/// Sampling interval of a series: a positive magnitude plus a free-form unit
/// label ("1 minute", "1 day", ...). The unit is carried for reporting only;
/// no estimator converts between units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickLag {
    pub value: f64,
    pub unit: String,
}

impl TickLag {
    pub fn new(value: f64, unit: impl Into<String>) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidParameter {
                name: "tick_lag",
                reason: format!("must be positive and finite, got {value}"),
            });
        }
        Ok(Self {
            value,
            unit: unit.into(),
        })
    }

    /// One unnamed tick; the default for synthetic series.
    pub fn ticks() -> Self {
        Self {
            value: 1.0,
            unit: "tick".to_string(),
        }
    }
}

/// A uniformly sampled sequence of observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    values: Vec<f64>,
    pub tick_lag: TickLag,
    pub label: String,
}

impl TimeSeries {
    /// Validates length and finiteness. Rejects series shorter than
    /// [`MIN_SERIES_LEN`] and any NaN/infinite sample.
    pub fn new(values: Vec<f64>, tick_lag: TickLag, label: impl Into<String>) -> Result<Self> {
        if values.len() < MIN_SERIES_LEN {
            return Err(Error::SeriesTooShort {
                len: values.len(),
                min: MIN_SERIES_LEN,
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            values,
            tick_lag,
            label: label.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Moment orders the multifractal estimators are evaluated at.
///
/// May include q = 0 and q = 1; every estimator handles those limits
/// explicitly rather than relying on the generic formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QGrid {
    values: Vec<f64>,
}

impl QGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter {
                name: "q_grid",
                reason: "empty".into(),
            });
        }
        if values.iter().any(|q| !q.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "q_grid",
                reason: "contains non-finite q".into(),
            });
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter {
                name: "q_grid",
                reason: "must be strictly increasing".into(),
            });
        }
        Ok(Self { values })
    }

    /// Inclusive arithmetic range; the endpoint is kept when it lands within
    /// a small tolerance of `min + k*step`.
    pub fn range(min: f64, max: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "q_step",
                reason: format!("must be positive, got {step}"),
            });
        }
        if max < min {
            return Err(Error::InvalidParameter {
                name: "q_range",
                reason: format!("max {max} < min {min}"),
            });
        }
        let n = ((max - min) / step + 1e-9).floor() as usize;
        let values: Vec<f64> = (0..=n).map(|i| min + i as f64 * step).collect();
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Window sizes, in ticks, at which scaling statistics are collected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleGrid {
    values: Vec<usize>,
}

impl ScaleGrid {
    /// Strictly increasing, minimum scale >= 4. The upper bound (<= N/4, so
    /// every scale admits at least four segments) depends on the series and
    /// is checked by [`ScaleGrid::validate_for`].
    pub fn new(values: Vec<usize>) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::InvalidParameter {
                name: "scale_grid",
                reason: format!("need at least 3 scales, got {}", values.len()),
            });
        }
        if values[0] < 4 {
            return Err(Error::InvalidParameter {
                name: "scale_grid",
                reason: format!("minimum scale must be >= 4, got {}", values[0]),
            });
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter {
                name: "scale_grid",
                reason: "must be strictly increasing".into(),
            });
        }
        Ok(Self { values })
    }

    /// `count` scales log-spaced over `[min, max]`, rounded to integers with
    /// duplicates removed.
    pub fn log_spaced(min: usize, max: usize, count: usize) -> Result<Self> {
        if min < 4 || max <= min {
            return Err(Error::InvalidParameter {
                name: "scale_grid",
                reason: format!("need 4 <= min < max, got min={min} max={max}"),
            });
        }
        if count < 3 {
            return Err(Error::InvalidParameter {
                name: "scale_grid",
                reason: format!("need at least 3 scales, got {count}"),
            });
        }
        let (lo, hi) = ((min as f64).ln(), (max as f64).ln());
        let mut values: Vec<usize> = (0..count)
            .map(|i| {
                let t = i as f64 / (count - 1) as f64;
                (lo + t * (hi - lo)).exp().round() as usize
            })
            .collect();
        values.dedup();
        Self::new(values)
    }

    /// Checks the grid against a concrete series length: max scale <= N/4.
    pub fn validate_for(&self, series_len: usize) -> Result<()> {
        let max = *self.values.last().expect("grid is non-empty");
        if max > series_len / 4 {
            return Err(Error::InvalidParameter {
                name: "scale_grid",
                reason: format!(
                    "maximum scale {max} exceeds N/4 = {} for series of length {series_len}",
                    series_len / 4
                ),
            });
        }
        Ok(())
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(values: Vec<f64>) -> Result<TimeSeries> {
        TimeSeries::new(values, TickLag::ticks(), "test")
    }

    #[test]
    fn rejects_short_series() {
        let err = series(vec![1.0; 15]).unwrap_err();
        assert!(matches!(err, Error::SeriesTooShort { len: 15, min: 16 }));
    }

    #[test]
    fn rejects_non_finite() {
        let mut v = vec![0.0; 32];
        v[7] = f64::NAN;
        let err = series(v).unwrap_err();
        assert!(matches!(err, Error::NonFinite { index: 7 }));
    }

    #[test]
    fn tick_lag_must_be_positive() {
        assert!(TickLag::new(0.0, "day").is_err());
        assert!(TickLag::new(-1.0, "day").is_err());
        assert!(TickLag::new(1.0, "day").is_ok());
    }

    #[test]
    fn q_grid_range_includes_endpoint() {
        let g = QGrid::range(-3.0, 3.0, 0.5).unwrap();
        assert_eq!(g.len(), 13);
        assert_eq!(g.values()[0], -3.0);
        assert_eq!(*g.values().last().unwrap(), 3.0);
    }

    #[test]
    fn q_grid_rejects_disorder() {
        assert!(QGrid::new(vec![0.0, 0.0, 1.0]).is_err());
        assert!(QGrid::new(vec![1.0, 0.5]).is_err());
    }

    #[test]
    fn scale_grid_bounds() {
        assert!(ScaleGrid::new(vec![2, 8, 16]).is_err());
        let g = ScaleGrid::new(vec![4, 8, 16]).unwrap();
        assert!(g.validate_for(64).is_ok());
        assert!(g.validate_for(63).is_err());
    }

    #[test]
    fn log_spaced_is_strictly_increasing() {
        let g = ScaleGrid::log_spaced(8, 4096, 20).unwrap();
        assert!(g.values().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(g.values()[0], 8);
        assert_eq!(*g.values().last().unwrap(), 4096);
    }
}
