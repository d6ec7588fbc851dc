//! Direct partition-function multifractal analysis on box measures:
//! occupancy probabilities p_j over dyadic boxes, Z(q,s) = sum p_j^q with
//! scaling exponent tau(q), and the generalized dimensions D(q).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, WithWarnings};
use crate::fit::fit_loglog;
use crate::series::{QGrid, TimeSeries};
use crate::spectrum::{SpectrumCurve, SpectrumKind};

/// Occupancy probabilities of the 2^level dyadic boxes at box size 2^-level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxMeasure {
    level: u32,
    weights: Vec<f64>,
}

impl BoxMeasure {
    /// Weights must be non-negative and sum to 1 within 1e-12, with exactly
    /// 2^level entries.
    pub fn new(level: u32, weights: Vec<f64>) -> Result<Self> {
        if level < 1 {
            return Err(Error::InvalidParameter {
                name: "level",
                reason: "must be at least 1".into(),
            });
        }
        let expected = 1usize << level;
        if weights.len() != expected {
            return Err(Error::InvalidParameter {
                name: "weights",
                reason: format!(
                    "level {level} needs {expected} weights, got {}",
                    weights.len()
                ),
            });
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidParameter {
                name: "weights",
                reason: "weights must be finite and non-negative".into(),
            });
        }
        // Compensated sum: at level 16 there are 65536 weights and naive
        // sequential rounding alone would breach the 1e-12 gate.
        let total = kahan_sum(&weights);
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "weights",
                reason: format!("weights sum to {total}, expected 1 within 1e-12"),
            });
        }
        Ok(Self { level, weights })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Box size s = 2^-level.
    pub fn box_size(&self) -> f64 {
        (self.level as f64 * -std::f64::consts::LN_2).exp()
    }
}

fn kahan_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for &v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Groups the index range of a series into 2^level equal boxes and assigns
/// each box its share of the total mass. The series must be non-negative;
/// convert signed data via absolute increments first.
pub fn measure_from_series(series: &TimeSeries, level: u32) -> Result<BoxMeasure> {
    let x = series.values();
    let boxes = 1usize << level;
    if x.len() < boxes {
        return Err(Error::InvalidParameter {
            name: "level",
            reason: format!("2^{level} boxes exceed series length {}", x.len()),
        });
    }
    if let Some(i) = x.iter().position(|&v| v < 0.0) {
        return Err(Error::InvalidParameter {
            name: "series",
            reason: format!(
                "negative value at index {i}; box measures need non-negative data \
                 (take absolute increments first)"
            ),
        });
    }
    let total = kahan_sum(x);
    if total <= 0.0 {
        return Err(Error::NullMeasure);
    }
    let mut sums = vec![0.0f64; boxes];
    for (j, chunk) in sums.iter_mut().enumerate() {
        let start = j * x.len() / boxes;
        let end = (j + 1) * x.len() / boxes;
        *chunk = kahan_sum(&x[start..end]);
    }
    let weights: Vec<f64> = sums.iter().map(|s| s / total).collect();
    // Division rounding can still push the sum off 1; renormalise once.
    let renorm = kahan_sum(&weights);
    BoxMeasure::new(level, weights.iter().map(|w| w / renorm).collect())
}

/// Partition function Z(q, s) = sum over occupied boxes of p_j^q, fitted
/// across levels to extract tau(q) from ln Z vs ln s (s = 2^-n).
///
/// q = 1 is pinned to tau(1) = 0: Z(1, s) = 1 identically for a normalized
/// measure. Zero-weight boxes are excluded from the sum; for q <= 0 this
/// exclusion is flagged because it is a convention, not a limit.
pub fn partition_function(
    measures: &[BoxMeasure],
    q_grid: &QGrid,
) -> Result<WithWarnings<SpectrumCurve>> {
    if measures.len() < 3 {
        return Err(Error::InsufficientScales {
            available: measures.len(),
            required: 3,
        });
    }
    let mut warnings = Vec::new();
    let any_zero_boxes = measures.iter().any(|m| m.weights.contains(&0.0));
    if any_zero_boxes && q_grid.values().iter().any(|&q| q <= 0.0) {
        warnings.push(
            "zero-weight boxes excluded from Z(q,s) for q <= 0 (limit convention)".to_string(),
        );
    }

    let mut tau = Vec::with_capacity(q_grid.len());
    let mut diagnostics = Vec::with_capacity(q_grid.len());
    for &q in q_grid.values() {
        // (s, Z) points; s = 2^-n.
        let points: Vec<(f64, f64)> = measures
            .iter()
            .map(|m| {
                let z: f64 = m
                    .weights
                    .iter()
                    .filter(|&&w| w > 0.0)
                    .map(|&w| w.powf(q))
                    .sum();
                (m.box_size(), z)
            })
            .collect();
        let fit = fit_loglog(&points, None)?;
        if q == 1.0 {
            tau.push(0.0);
        } else {
            tau.push(fit.slope);
        }
        diagnostics.push(Some(fit));
    }

    let curve = SpectrumCurve::new(
        SpectrumKind::TauOfQ,
        q_grid.values().to_vec(),
        tau,
        diagnostics,
    )?;
    Ok(WithWarnings::new(curve, warnings))
}

/// Generalized dimensions D(q) = tau(q)/(q-1), with the information
/// dimension D(1) taken from the derivative of tau at q = 1.
pub fn generalized_dimensions(tau: &SpectrumCurve) -> Result<SpectrumCurve> {
    if tau.kind != SpectrumKind::TauOfQ {
        return Err(Error::IncompatibleKinds {
            a: tau.kind.to_string(),
            b: SpectrumKind::TauOfQ.to_string(),
        });
    }
    let q = tau.abscissa();
    let t = tau.ordinate();
    let d: Vec<f64> = (0..q.len())
        .map(|i| {
            if (q[i] - 1.0).abs() > 1e-9 {
                t[i] / (q[i] - 1.0)
            } else {
                // Information dimension: dtau/dq at q = 1.
                derivative_at(q, t, i)
            }
        })
        .collect();
    SpectrumCurve::new(
        SpectrumKind::DOfQ,
        q.to_vec(),
        d,
        tau.diagnostics().to_vec(),
    )
}

fn derivative_at(x: &[f64], y: &[f64], i: usize) -> f64 {
    let n = x.len();
    if n < 2 {
        return f64::NAN;
    }
    if i == 0 {
        (y[1] - y[0]) / (x[1] - x[0])
    } else if i == n - 1 {
        (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2])
    } else {
        (y[i + 1] - y[i - 1]) / (x[i + 1] - x[i - 1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::TickLag;
    use approx::assert_abs_diff_eq;

    fn uniform_measure(level: u32) -> BoxMeasure {
        let n = 1usize << level;
        BoxMeasure::new(level, vec![1.0 / n as f64; n]).unwrap()
    }

    /// Exact cascade box masses built directly from the closed-form products
    /// a^i (1-a)^(k-i), independent of the generator.
    fn cascade_measure(a: f64, level: u32) -> BoxMeasure {
        let mut weights = vec![1.0];
        for _ in 0..level {
            let mut next = Vec::with_capacity(weights.len() * 2);
            for w in &weights {
                next.push(w * a);
                next.push(w * (1.0 - a));
            }
            weights = next;
        }
        BoxMeasure::new(level, weights).unwrap()
    }

    fn cascade_tau(a: f64, q: f64) -> f64 {
        -(a.powf(q) + (1.0 - a).powf(q)).log2()
    }

    #[test]
    fn measure_from_uniform_series() {
        let s = TimeSeries::new(vec![1.0; 16], TickLag::ticks(), "ones").unwrap();
        let m = measure_from_series(&s, 2).unwrap();
        assert_eq!(m.weights(), &[0.25, 0.25, 0.25, 0.25]);
    }

    #[test]
    fn measure_concentrates_mass() {
        let mut v = vec![0.0; 16];
        v[0] = 1.0;
        let s = TimeSeries::new(v, TickLag::ticks(), "spike").unwrap();
        let m = measure_from_series(&s, 2).unwrap();
        assert_eq!(m.weights(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn null_measure_is_rejected() {
        let s = TimeSeries::new(vec![0.0; 16], TickLag::ticks(), "zeros").unwrap();
        assert!(matches!(
            measure_from_series(&s, 2),
            Err(Error::NullMeasure)
        ));
    }

    #[test]
    fn negative_values_are_rejected() {
        let mut v = vec![1.0; 16];
        v[3] = -1.0;
        let s = TimeSeries::new(v, TickLag::ticks(), "signed").unwrap();
        assert!(measure_from_series(&s, 2).is_err());
    }

    #[test]
    fn uniform_measure_has_linear_tau() {
        let measures: Vec<BoxMeasure> = (4..=8).map(uniform_measure).collect();
        let q = QGrid::range(-4.0, 4.0, 0.5).unwrap();
        let tau = partition_function(&measures, &q).unwrap().value;
        for (i, &qv) in q.values().iter().enumerate() {
            assert_abs_diff_eq!(tau.ordinate()[i], qv - 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn tau_at_one_is_exactly_zero() {
        let measures: Vec<BoxMeasure> = (4..=8).map(|n| cascade_measure(0.7, n)).collect();
        let q = QGrid::new(vec![0.5, 1.0, 2.0]).unwrap();
        let tau = partition_function(&measures, &q).unwrap().value;
        assert_eq!(tau.ordinate()[1], 0.0);
    }

    #[test]
    fn cascade_tau_matches_closed_form() {
        let a = 0.6;
        let measures: Vec<BoxMeasure> = (6..=12).map(|n| cascade_measure(a, n)).collect();
        let q = QGrid::range(-4.0, 4.0, 0.25).unwrap();
        let tau = partition_function(&measures, &q).unwrap().value;
        for (i, &qv) in q.values().iter().enumerate() {
            assert_abs_diff_eq!(tau.ordinate()[i], cascade_tau(a, qv), epsilon = 1e-3);
        }
        // tau(2) = -log2(0.52)
        let i2 = q.values().iter().position(|&q| q == 2.0).unwrap();
        assert_abs_diff_eq!(tau.ordinate()[i2], 0.9434, epsilon = 1e-3);
    }

    #[test]
    fn tau_is_concave_on_exact_cascade() {
        let measures: Vec<BoxMeasure> = (6..=12).map(|n| cascade_measure(0.6, n)).collect();
        let q = QGrid::range(-4.0, 4.0, 0.25).unwrap();
        let tau = partition_function(&measures, &q).unwrap().value;
        let qs = tau.abscissa();
        let ts = tau.ordinate();
        for i in 1..qs.len() - 1 {
            let left = (ts[i] - ts[i - 1]) / (qs[i] - qs[i - 1]);
            let right = (ts[i + 1] - ts[i]) / (qs[i + 1] - qs[i]);
            assert!(right - left <= 1e-6, "tau not concave at q={}", qs[i]);
        }
    }

    #[test]
    fn permuting_weights_changes_nothing() {
        let a = 0.65;
        let measures: Vec<BoxMeasure> = (4..=9).map(|n| cascade_measure(a, n)).collect();
        let permuted: Vec<BoxMeasure> = measures
            .iter()
            .map(|m| {
                let mut w = m.weights().to_vec();
                w.reverse();
                w.rotate_left(3);
                BoxMeasure::new(m.level(), w).unwrap()
            })
            .collect();
        let q = QGrid::range(-3.0, 3.0, 0.5).unwrap();
        let t1 = partition_function(&measures, &q).unwrap().value;
        let t2 = partition_function(&permuted, &q).unwrap().value;
        for (a, b) in t1.ordinate().iter().zip(t2.ordinate()) {
            // Permutation only reorders the Z summation.
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_weight_boxes_flagged_for_non_positive_q() {
        let m: Vec<BoxMeasure> = (2..=4)
            .map(|n| {
                let size = 1usize << n;
                let mut w = vec![0.0; size];
                // Mass on half the boxes only.
                for (i, x) in w.iter_mut().enumerate() {
                    if i % 2 == 0 {
                        *x = 2.0 / size as f64;
                    }
                }
                BoxMeasure::new(n, w).unwrap()
            })
            .collect();
        let q = QGrid::range(-2.0, 2.0, 1.0).unwrap();
        let out = partition_function(&m, &q).unwrap();
        assert!(out.warnings.iter().any(|w| w.contains("zero-weight")));
    }

    #[test]
    fn dimensions_of_uniform_measure_are_one() {
        let measures: Vec<BoxMeasure> = (4..=8).map(uniform_measure).collect();
        let q = QGrid::new(vec![-2.0, 0.0, 1.0, 2.0, 3.0]).unwrap();
        let tau = partition_function(&measures, &q).unwrap().value;
        let d = generalized_dimensions(&tau).unwrap();
        for &v in d.ordinate() {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn cascade_dimensions_match_closed_form() {
        let a = 0.6;
        let measures: Vec<BoxMeasure> = (6..=12).map(|n| cascade_measure(a, n)).collect();
        let q = QGrid::new(vec![0.0, 1.0, 2.0]).unwrap();
        let tau = partition_function(&measures, &q).unwrap().value;
        let d = generalized_dimensions(&tau).unwrap();
        // D(0) = tau(0)/(0-1) = 1; support fills the interval.
        assert_abs_diff_eq!(d.ordinate()[0], 1.0, epsilon = 1e-6);
        // D(2) = tau(2)/(2-1) = 0.9434...
        assert_abs_diff_eq!(d.ordinate()[2], -(0.52_f64).log2(), epsilon = 1e-3);
    }

    #[test]
    fn dimensions_are_non_increasing_in_q() {
        let a = 0.7;
        let measures: Vec<BoxMeasure> = (5..=10).map(|n| cascade_measure(a, n)).collect();
        let q = QGrid::range(-4.0, 4.0, 0.5).unwrap();
        let tau = partition_function(&measures, &q).unwrap().value;
        let d = generalized_dimensions(&tau).unwrap();
        for w in d.ordinate().windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "D(q) increased: {} -> {}", w[0], w[1]);
        }
    }
}
