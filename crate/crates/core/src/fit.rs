//! The regression engine every scaling exponent passes through: ordinary
//! least squares in log-log (power laws) or semi-log (entropy vs ln t)
//! coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Result of a scaling regression. `slope` is the scaling exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination in the fit coordinates, in [0, 1].
    pub r_squared: f64,
    /// Standard error of the slope (0 for a perfect fit).
    pub stderr_slope: f64,
    /// The (x, y) pairs actually used, in fit coordinates
    /// (ln scale, ln value) for log-log, (ln t, S) for semi-log.
    pub points: Vec<(f64, f64)>,
    /// Scale interval the fit was restricted to, in original units.
    pub fit_range: (f64, f64),
}

/// Fits `value = c * scale^slope` by OLS on (ln scale, ln value).
///
/// `fit_range`, when given, restricts the fit to scales inside the closed
/// interval. All values inside the range must be strictly positive; a
/// non-positive value signals the upstream estimator produced a degenerate
/// statistic and is rejected rather than skipped.
pub fn fit_loglog(points: &[(f64, f64)], fit_range: Option<(f64, f64)>) -> Result<LogLogFit> {
    let selected = select_range(points, fit_range)?;
    for &(scale, value) in &selected {
        // NaN must not slip through as "positive".
        if value.is_nan() || value <= 0.0 || scale.is_nan() || scale <= 0.0 {
            return Err(Error::NonPositiveScalingQuantity { scale });
        }
    }
    let xy: Vec<(f64, f64)> = selected.iter().map(|&(s, v)| (s.ln(), v.ln())).collect();
    ols(&xy, range_of(&selected))
}

/// Fits `y = intercept + slope * ln x` by OLS on (ln x, y). Used for the
/// entropy scaling law, where y may be negative.
pub fn fit_semilog(points: &[(f64, f64)], fit_range: Option<(f64, f64)>) -> Result<LogLogFit> {
    let selected = select_range(points, fit_range)?;
    for &(scale, _) in &selected {
        if scale.is_nan() || scale <= 0.0 {
            return Err(Error::NonPositiveScalingQuantity { scale });
        }
    }
    let xy: Vec<(f64, f64)> = selected.iter().map(|&(s, v)| (s.ln(), v)).collect();
    ols(&xy, range_of(&selected))
}

fn select_range(points: &[(f64, f64)], fit_range: Option<(f64, f64)>) -> Result<Vec<(f64, f64)>> {
    let selected: Vec<(f64, f64)> = match fit_range {
        Some((lo, hi)) => points
            .iter()
            .copied()
            .filter(|&(s, _)| s >= lo && s <= hi)
            .collect(),
        None => points.to_vec(),
    };
    if selected.len() < 3 {
        return Err(Error::InsufficientScales {
            available: selected.len(),
            required: 3,
        });
    }
    Ok(selected)
}

fn range_of(points: &[(f64, f64)]) -> (f64, f64) {
    let min = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let max = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    (min, max)
}

fn ols(xy: &[(f64, f64)], fit_range: (f64, f64)) -> Result<LogLogFit> {
    let n = xy.len() as f64;
    let mean_x = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = xy.iter().map(|p| p.1).sum::<f64>() / n;

    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for &(x, y) in xy {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::InvalidParameter {
            name: "points",
            reason: "all scales identical; slope undefined".into(),
        });
    }

    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;

    let ss_res: f64 = xy
        .iter()
        .map(|&(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    // A constant response is a perfect (flat) power law, not a failed fit.
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    let stderr_slope = if xy.len() > 2 {
        (ss_res / (n - 2.0) / sxx).max(0.0).sqrt()
    } else {
        0.0
    };

    if !slope.is_finite() {
        return Err(Error::InvalidParameter {
            name: "points",
            reason: "regression produced a non-finite slope".into(),
        });
    }

    Ok(LogLogFit {
        slope,
        intercept,
        r_squared,
        stderr_slope,
        points: xy.to_vec(),
        fit_range,
    })
}
