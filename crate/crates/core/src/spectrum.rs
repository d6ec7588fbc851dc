//! Sampled exponent curves — h(q), tau(q), D(q), delta(q), f(alpha) — the
//! Legendre transform pair connecting tau(q) and f(alpha), and the
//! cross-estimator comparison report.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, WithWarnings};
use crate::fit::LogLogFit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    HOfQ,
    TauOfQ,
    DOfQ,
    DeltaOfQ,
    FOfAlpha,
}

impl std::fmt::Display for SpectrumKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SpectrumKind::HOfQ => "h_of_q",
            SpectrumKind::TauOfQ => "tau_of_q",
            SpectrumKind::DOfQ => "d_of_q",
            SpectrumKind::DeltaOfQ => "delta_of_q",
            SpectrumKind::FOfAlpha => "f_of_alpha",
        };
        f.write_str(s)
    }
}

/// A sampled exponent function on a q-grid (or alpha-grid for `FOfAlpha`),
/// with the per-point regression diagnostics where the ordinate came from a
/// scaling fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumCurve {
    pub kind: SpectrumKind,
    abscissa: Vec<f64>,
    ordinate: Vec<f64>,
    diagnostics: Vec<Option<LogLogFit>>,
}

impl SpectrumCurve {
    pub fn new(
        kind: SpectrumKind,
        abscissa: Vec<f64>,
        ordinate: Vec<f64>,
        diagnostics: Vec<Option<LogLogFit>>,
    ) -> Result<Self> {
        if abscissa.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        if abscissa.len() != ordinate.len() {
            return Err(Error::InvalidParameter {
                name: "spectrum",
                reason: format!(
                    "abscissa length {} != ordinate length {}",
                    abscissa.len(),
                    ordinate.len()
                ),
            });
        }
        if !diagnostics.is_empty() && diagnostics.len() != abscissa.len() {
            return Err(Error::InvalidParameter {
                name: "spectrum",
                reason: "diagnostics length mismatch".into(),
            });
        }
        if abscissa.iter().any(|v| !v.is_finite()) || ordinate.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "spectrum",
                reason: "non-finite point".into(),
            });
        }
        if abscissa.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter {
                name: "spectrum",
                reason: "abscissa must be strictly increasing".into(),
            });
        }
        let diagnostics = if diagnostics.is_empty() {
            vec![None; abscissa.len()]
        } else {
            diagnostics
        };
        Ok(Self {
            kind,
            abscissa,
            ordinate,
            diagnostics,
        })
    }

    /// Curve without per-point fit diagnostics.
    pub fn bare(kind: SpectrumKind, abscissa: Vec<f64>, ordinate: Vec<f64>) -> Result<Self> {
        Self::new(kind, abscissa, ordinate, Vec::new())
    }

    pub fn abscissa(&self) -> &[f64] {
        &self.abscissa
    }

    pub fn ordinate(&self) -> &[f64] {
        &self.ordinate
    }

    pub fn diagnostics(&self) -> &[Option<LogLogFit>] {
        &self.diagnostics
    }

    pub fn len(&self) -> usize {
        self.abscissa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissa.is_empty()
    }

    /// Ordinate at `x` by linear interpolation; `None` outside the support.
    pub fn interpolate(&self, x: f64) -> Option<f64> {
        let a = &self.abscissa;
        if x < a[0] || x > *a.last().unwrap() {
            return None;
        }
        match a.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => Some(self.ordinate[i]),
            Err(i) => {
                let (x0, x1) = (a[i - 1], a[i]);
                let (y0, y1) = (self.ordinate[i - 1], self.ordinate[i]);
                Some(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
            }
        }
    }

    /// Width of the abscissa support.
    pub fn support_width(&self) -> f64 {
        self.abscissa.last().unwrap() - self.abscissa[0]
    }
}

/// One point of the q-parametrized Legendre transform: the local exponent
/// alpha(q) = dtau/dq and the spectrum value f(alpha(q)) = q alpha - tau.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegendrePoint {
    pub q: f64,
    pub alpha: f64,
    pub f: f64,
}

/// Derivative d(ordinate)/d(abscissa) by central differences, with
/// three-point one-sided stencils at the endpoints.
fn grid_derivative(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    debug_assert!(n >= 3);
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = (y[i + 1] - y[i - 1]) / (x[i + 1] - x[i - 1]);
    }
    d[0] = one_sided(x[0], x[1], x[2], y[0], y[1], y[2]);
    d[n - 1] = one_sided(x[n - 1], x[n - 2], x[n - 3], y[n - 1], y[n - 2], y[n - 3]);
    d
}

/// Derivative at x0 from the quadratic through (x0,y0),(x1,y1),(x2,y2).
fn one_sided(x0: f64, x1: f64, x2: f64, y0: f64, y1: f64, y2: f64) -> f64 {
    y0 * (2.0 * x0 - x1 - x2) / ((x0 - x1) * (x0 - x2))
        + y1 * (x0 - x2) / ((x1 - x0) * (x1 - x2))
        + y2 * (x0 - x1) / ((x2 - x0) * (x2 - x1))
}

/// The q-parametrized transform underlying [`legendre_tau_to_f`], exposed so
/// callers can export per-q (alpha, f) columns aligned with h(q) and tau(q).
pub fn legendre_pointwise(tau: &SpectrumCurve) -> Result<Vec<LegendrePoint>> {
    if tau.kind != SpectrumKind::TauOfQ {
        return Err(Error::IncompatibleKinds {
            a: tau.kind.to_string(),
            b: SpectrumKind::TauOfQ.to_string(),
        });
    }
    if tau.len() < 5 {
        return Err(Error::InsufficientScales {
            available: tau.len(),
            required: 5,
        });
    }
    let q = tau.abscissa();
    let t = tau.ordinate();
    let alpha = grid_derivative(q, t);
    Ok((0..q.len())
        .map(|i| LegendrePoint {
            q: q[i],
            alpha: alpha[i],
            f: q[i] * alpha[i] - t[i],
        })
        .collect())
}

/// Checks concavity of tau(q) via discrete slope differences; returns the
/// worst (largest) slope increase found. A concave tau has non-increasing
/// slopes, so anything positive beyond rounding is a defect.
fn concavity_defect(q: &[f64], t: &[f64]) -> f64 {
    let mut worst = 0.0_f64;
    for i in 1..q.len() - 1 {
        let left = (t[i] - t[i - 1]) / (q[i] - q[i - 1]);
        let right = (t[i + 1] - t[i]) / (q[i + 1] - q[i]);
        worst = worst.max(right - left);
    }
    worst
}

/// Numerical inversion of the Legendre pairing: alpha(q) = dtau/dq by finite
/// differences, f(alpha(q)) = q alpha(q) - tau(q). Output is sorted by alpha
/// with duplicate-alpha points collapsed to the maximum f.
///
/// A tau curve that is non-concave beyond tolerance is transformed anyway
/// and flagged; spectrum discontinuities are information about the data, not
/// a reason to repair the curve.
pub fn legendre_tau_to_f(tau: &SpectrumCurve) -> Result<WithWarnings<SpectrumCurve>> {
    let points = legendre_pointwise(tau)?;

    let mut warnings = Vec::new();
    let tol = 1e-6 * tau.ordinate().iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let defect = concavity_defect(tau.abscissa(), tau.ordinate());
    if defect > tol {
        warnings.push(format!(
            "non-concave spectrum — estimation artifact (concavity defect {defect:.3e})"
        ));
    }

    let mut by_alpha: Vec<(f64, f64)> = points.iter().map(|p| (p.alpha, p.f)).collect();
    by_alpha.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    // Collapse alphas equal to within rounding noise, keeping the max f.
    let alpha_scale = by_alpha.iter().fold(1.0_f64, |m, p| m.max(p.0.abs()));
    let eps = 1e-9 * alpha_scale;
    let mut collapsed: Vec<(f64, f64)> = Vec::with_capacity(by_alpha.len());
    for (a, f) in by_alpha {
        match collapsed.last_mut() {
            Some(last) if a - last.0 <= eps => last.1 = last.1.max(f),
            _ => collapsed.push((a, f)),
        }
    }

    let (alpha, f): (Vec<f64>, Vec<f64>) = collapsed.into_iter().unzip();
    let curve = SpectrumCurve::bare(SpectrumKind::FOfAlpha, alpha, f)?;
    Ok(WithWarnings::new(curve, warnings))
}

/// Direct evaluation of the Legendre pairing tau(q) = extremum over sampled
/// alpha of [q alpha - f(alpha)] on the requested q grid.
///
/// With tau defined as the slope of ln Z against ln s (s -> 0), tau is
/// concave and f is its concave conjugate, so the recovering extremum is the
/// minimum: for a concave f the objective q alpha - f(alpha) is convex in
/// alpha and touches tau exactly at the tangent point alpha(q). (A single
/// sampled atom reduces to the same linear tau either way.)
pub fn legendre_f_to_tau(f: &SpectrumCurve, q_grid: &[f64]) -> Result<SpectrumCurve> {
    if f.kind != SpectrumKind::FOfAlpha {
        return Err(Error::IncompatibleKinds {
            a: f.kind.to_string(),
            b: SpectrumKind::FOfAlpha.to_string(),
        });
    }
    if f.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let tau: Vec<f64> = q_grid
        .iter()
        .map(|&q| {
            f.abscissa()
                .iter()
                .zip(f.ordinate())
                .map(|(&a, &fa)| q * a - fa)
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    SpectrumCurve::bare(SpectrumKind::TauOfQ, q_grid.to_vec(), tau)
}

/// Deterministic numeric report from comparing two spectra on their common
/// abscissa overlap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumComparison {
    /// Kind both curves were normalised to before comparing.
    pub compared_kind: SpectrumKind,
    pub max_abs_deviation: f64,
    pub overlap: (f64, f64),
    pub support_width_a: f64,
    pub support_width_b: f64,
    pub discontinuity_a: bool,
    pub discontinuity_b: bool,
}

/// Maps h(q) and delta(q) curves onto tau(q) so estimators with different
/// native exponents can be compared; D(q) maps via tau = D (q - 1).
pub fn normalize_to_tau(curve: &SpectrumCurve) -> Result<SpectrumCurve> {
    let q = curve.abscissa().to_vec();
    let tau: Vec<f64> = match curve.kind {
        SpectrumKind::TauOfQ => return Ok(curve.clone()),
        SpectrumKind::HOfQ | SpectrumKind::DeltaOfQ => q
            .iter()
            .zip(curve.ordinate())
            .map(|(&q, &v)| q * v - 1.0)
            .collect(),
        SpectrumKind::DOfQ => q
            .iter()
            .zip(curve.ordinate())
            .map(|(&q, &d)| d * (q - 1.0))
            .collect(),
        SpectrumKind::FOfAlpha => {
            return Err(Error::IncompatibleKinds {
                a: curve.kind.to_string(),
                b: SpectrumKind::TauOfQ.to_string(),
            })
        }
    };
    SpectrumCurve::new(SpectrumKind::TauOfQ, q, tau, curve.diagnostics().to_vec())
}

/// Any adjacent ordinate jump exceeding five times the median adjacent jump
/// marks the curve as discontinuous.
fn has_discontinuity(curve: &SpectrumCurve) -> bool {
    let y = curve.ordinate();
    if y.len() < 3 {
        return false;
    }
    let mut jumps: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    jumps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = jumps[jumps.len() / 2];
    jumps.last().copied().unwrap_or(0.0) > 5.0 * median
}

/// Compares two spectra of compatible kinds. f(alpha) curves compare only
/// with each other; all q-indexed kinds are first normalised to tau(q).
pub fn compare_spectra(a: &SpectrumCurve, b: &SpectrumCurve) -> Result<SpectrumComparison> {
    let (na, nb) = if a.kind == SpectrumKind::FOfAlpha || b.kind == SpectrumKind::FOfAlpha {
        if a.kind != b.kind {
            return Err(Error::IncompatibleKinds {
                a: a.kind.to_string(),
                b: b.kind.to_string(),
            });
        }
        (a.clone(), b.clone())
    } else {
        (normalize_to_tau(a)?, normalize_to_tau(b)?)
    };

    let lo = na.abscissa()[0].max(nb.abscissa()[0]);
    let hi = na
        .abscissa()
        .last()
        .unwrap()
        .min(*nb.abscissa().last().unwrap());
    if lo > hi {
        return Err(Error::NoOverlap);
    }

    // Evaluate on the union of both grids restricted to the overlap.
    let mut xs: Vec<f64> = na
        .abscissa()
        .iter()
        .chain(nb.abscissa())
        .copied()
        .filter(|&x| x >= lo && x <= hi)
        .collect();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    xs.dedup();

    let max_abs_deviation = xs
        .iter()
        .map(|&x| (na.interpolate(x).unwrap() - nb.interpolate(x).unwrap()).abs())
        .fold(0.0, f64::max);

    Ok(SpectrumComparison {
        compared_kind: na.kind,
        max_abs_deviation,
        overlap: (lo, hi),
        support_width_a: na.support_width(),
        support_width_b: nb.support_width(),
        discontinuity_a: has_discontinuity(&na),
        discontinuity_b: has_discontinuity(&nb),
    })
}
