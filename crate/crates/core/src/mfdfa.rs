//! Hurst-exponent and MF-DFA estimation: profile building, segmentation,
//! polynomial detrending, the fluctuation surface F(q,s), h(q) and
//! tau(q) = q h(q) - 1, plus rescaled-range and rolling-window Hurst.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, WithWarnings};
use crate::fit::{fit_loglog, LogLogFit};
use crate::series::{QGrid, ScaleGrid, TimeSeries};
use crate::spectrum::{SpectrumCurve, SpectrumKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DfaConfig {
    /// Degree of the per-segment detrending polynomial.
    pub poly_order: usize,
    pub q_grid: QGrid,
    pub scale_grid: ScaleGrid,
    /// Segment both from the start and from the end of the profile so
    /// trailing points are not discarded. On by default.
    pub two_sided_segmentation: bool,
}

impl DfaConfig {
    pub fn new(poly_order: usize, q_grid: QGrid, scale_grid: ScaleGrid) -> Self {
        Self {
            poly_order,
            q_grid,
            scale_grid,
            two_sided_segmentation: true,
        }
    }

    /// Every segment must overdetermine its trend fit: poly_order + 2 must
    /// not exceed the smallest scale. The scale grid must also fit the
    /// series (max scale <= N/4).
    pub fn validate_for(&self, series_len: usize) -> Result<()> {
        let min_scale = self.scale_grid.values()[0];
        if self.poly_order + 2 > min_scale {
            return Err(Error::InvalidParameter {
                name: "scale_grid",
                reason: format!(
                    "scale grid violates poly_order + 2 <= min scale \
                     ({} + 2 > {min_scale})",
                    self.poly_order
                ),
            });
        }
        self.scale_grid.validate_for(series_len)
    }
}

/// Cumulative sum of mean-subtracted values: Y_k = sum_{i<=k} (x_i - mean).
pub fn profile(series: &TimeSeries) -> TimeSeries {
    let mean = series.mean();
    let mut acc = 0.0;
    let values: Vec<f64> = series
        .values()
        .iter()
        .map(|&x| {
            acc += x - mean;
            acc
        })
        .collect();
    TimeSeries::new(values, series.tick_lag.clone(), series.label.clone())
        .expect("profile preserves length and finiteness")
}

/// Least-squares polynomial detrender for fixed segment length and degree.
/// The normal matrix depends only on (length, degree), so it is factorized
/// once and reused across all segments of a scale.
struct Detrender {
    degree: usize,
    xs: Vec<f64>,
    chol: Vec<f64>, // lower-triangular Cholesky factor, row-major (m+1)^2
}

impl Detrender {
    fn new(len: usize, degree: usize) -> Self {
        // Abscissa normalised to [-1, 1] keeps the normal matrix
        // well-conditioned for the degrees used in practice.
        let xs: Vec<f64> = if len == 1 {
            vec![0.0]
        } else {
            (0..len)
                .map(|i| 2.0 * i as f64 / (len - 1) as f64 - 1.0)
                .collect()
        };
        let m = degree + 1;
        let mut gram = vec![0.0; m * m];
        for &x in &xs {
            let mut pi = 1.0;
            let mut powers = Vec::with_capacity(m);
            for _ in 0..m {
                powers.push(pi);
                pi *= x;
            }
            for r in 0..m {
                for c in 0..=r {
                    gram[r * m + c] += powers[r] * powers[c];
                }
            }
        }
        let chol = cholesky(&gram, m);
        Self { degree, xs, chol }
    }

    /// RMS of the residuals after removing the best-fit polynomial:
    /// sqrt((1/s) sum r_i^2).
    fn rms_residual(&self, segment: &[f64]) -> f64 {
        let m = self.degree + 1;
        let mut rhs = vec![0.0; m];
        for (i, &y) in segment.iter().enumerate() {
            let mut pi = 1.0;
            for r in rhs.iter_mut() {
                *r += pi * y;
                pi *= self.xs[i];
            }
        }
        let coeffs = chol_solve(&self.chol, m, &rhs);
        let mut ss = 0.0;
        for (i, &y) in segment.iter().enumerate() {
            // Horner evaluation of the fitted trend.
            let x = self.xs[i];
            let mut trend = coeffs[self.degree];
            for k in (0..self.degree).rev() {
                trend = trend * x + coeffs[k];
            }
            let r = y - trend;
            ss += r * r;
        }
        (ss / segment.len() as f64).sqrt()
    }
}

/// Cholesky factorization of a symmetric positive-definite matrix given by
/// its lower triangle.
fn cholesky(a: &[f64], n: usize) -> Vec<f64> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i * n + j];
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                l[i * n + i] = sum.max(0.0).sqrt();
            } else {
                l[i * n + j] = if l[j * n + j] != 0.0 {
                    sum / l[j * n + j]
                } else {
                    0.0
                };
            }
        }
    }
    l
}

fn chol_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    // Forward substitution L y = b.
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i * n + k] * y[k];
        }
        y[i] = if l[i * n + i] != 0.0 {
            sum / l[i * n + i]
        } else {
            0.0
        };
    }
    // Back substitution L^T x = y.
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut sum = y[i];
        for k in i + 1..n {
            sum -= l[k * n + i] * x[k];
        }
        x[i] = if l[i * n + i] != 0.0 {
            sum / l[i * n + i]
        } else {
            0.0
        };
    }
    x
}

/// Local fluctuation of one profile segment: RMS of the residuals from the
/// best-fit polynomial of degree `poly_order` over the `s` segment points.
pub fn local_fluctuation(
    profile: &TimeSeries,
    segment: (usize, usize),
    poly_order: usize,
) -> Result<f64> {
    let (start, s) = segment;
    if s < poly_order + 2 {
        return Err(Error::InvalidParameter {
            name: "segment",
            reason: format!(
                "segment length {s} must be at least poly_order + 2 = {}",
                poly_order + 2
            ),
        });
    }
    let end = start
        .checked_add(s)
        .filter(|&e| e <= profile.len())
        .ok_or_else(|| Error::InvalidParameter {
            name: "segment",
            reason: format!(
                "segment ({start}, {s}) out of bounds for length {}",
                profile.len()
            ),
        })?;
    let detrender = Detrender::new(s, poly_order);
    Ok(detrender.rms_residual(&profile.values()[start..end]))
}

/// The fluctuation values F(q,s) over the configured grids, together with
/// the per-scale segment counts and local fluctuations they came from.
#[derive(Debug, Clone)]
pub struct FluctuationSurface {
    q_values: Vec<f64>,
    scales: Vec<usize>,
    /// Row-major [q][scale]; unusable cells hold NaN.
    values: Vec<f64>,
    usable: Vec<bool>,
    segment_counts: Vec<usize>,
    locals: Vec<Vec<f64>>,
}

impl FluctuationSurface {
    pub fn q_values(&self) -> &[f64] {
        &self.q_values
    }

    pub fn scales(&self) -> &[usize] {
        &self.scales
    }

    pub fn value(&self, qi: usize, si: usize) -> f64 {
        self.values[qi * self.scales.len() + si]
    }

    pub fn is_usable(&self, qi: usize, si: usize) -> bool {
        self.usable[qi * self.scales.len() + si]
    }

    /// Pooled number of segments at scale index `si`.
    pub fn segment_count(&self, si: usize) -> usize {
        self.segment_counts[si]
    }

    /// Local fluctuations f(nu, s) pooled over both segmentations.
    pub fn local_fluctuations(&self, si: usize) -> &[f64] {
        &self.locals[si]
    }

    /// Usable (scale, F) points for one q, ready for regression.
    pub fn points_for(&self, qi: usize) -> Vec<(f64, f64)> {
        (0..self.scales.len())
            .filter(|&si| self.is_usable(qi, si))
            .map(|si| (self.scales[si] as f64, self.value(qi, si)))
            .collect()
    }
}

/// Generalized mean of the local fluctuations. Factors out the dominant
/// element so large |q| neither overflows nor underflows.
fn generalized_mean(locals: &[f64], q: f64) -> f64 {
    let n = locals.len() as f64;
    if q == 0.0 {
        let log_sum: f64 = locals.iter().map(|&f| f.ln()).sum();
        return (log_sum / n).exp();
    }
    let pivot = if q > 0.0 {
        locals.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    } else {
        locals.iter().copied().fold(f64::INFINITY, f64::min)
    };
    if pivot <= 0.0 {
        return 0.0;
    }
    let sum: f64 = locals.iter().map(|&f| (f / pivot).powf(q)).sum();
    pivot * (sum / n).powf(1.0 / q)
}

/// Builds the profile, segments it at every scale (two-sided by default),
/// detrends each segment, and assembles F(q,s) as the generalized mean of
/// the local fluctuations; q = 0 uses the logarithmic mean.
///
/// Cells that cannot be used — zero local fluctuation with q <= 0, or a
/// degenerate all-zero scale — are excluded from later regressions and
/// reported in the warnings, never silently dropped.
pub fn fluctuation_function(
    series: &TimeSeries,
    cfg: &DfaConfig,
) -> Result<WithWarnings<FluctuationSurface>> {
    cfg.validate_for(series.len())?;
    let prof = profile(series);
    let n = prof.len();
    let scales = cfg.scale_grid.values();
    let q_values = cfg.q_grid.values();

    let mut locals_per_scale = Vec::with_capacity(scales.len());
    let mut segment_counts = Vec::with_capacity(scales.len());
    let mut warnings = Vec::new();

    for &s in scales {
        let n_s = n / s;
        let detrender = Detrender::new(s, cfg.poly_order);
        let mut locals = Vec::with_capacity(if cfg.two_sided_segmentation {
            2 * n_s
        } else {
            n_s
        });
        for i in 0..n_s {
            locals.push(detrender.rms_residual(&prof.values()[i * s..(i + 1) * s]));
        }
        if cfg.two_sided_segmentation {
            for i in 0..n_s {
                let end = n - i * s;
                locals.push(detrender.rms_residual(&prof.values()[end - s..end]));
            }
        }
        if locals.iter().all(|&f| f == 0.0) {
            warnings.push(format!(
                "scale {s}: degenerate (all local fluctuations zero)"
            ));
        }
        segment_counts.push(locals.len());
        locals_per_scale.push(locals);
    }

    let mut values = vec![f64::NAN; q_values.len() * scales.len()];
    let mut usable = vec![false; q_values.len() * scales.len()];
    for (qi, &q) in q_values.iter().enumerate() {
        let mut dropped: Vec<usize> = Vec::new();
        for (si, locals) in locals_per_scale.iter().enumerate() {
            let has_zero = locals.contains(&0.0);
            if q <= 0.0 && has_zero {
                dropped.push(scales[si]);
                continue;
            }
            let f = generalized_mean(locals, q);
            let idx = qi * scales.len() + si;
            if f.is_finite() && f > 0.0 {
                values[idx] = f;
                usable[idx] = true;
            } else {
                dropped.push(scales[si]);
            }
        }
        if !dropped.is_empty() {
            warnings.push(format!(
                "q={q}: {} unusable cell(s) at scale(s) {:?}",
                dropped.len(),
                dropped
            ));
        }
    }

    let surface = FluctuationSurface {
        q_values: q_values.to_vec(),
        scales: scales.to_vec(),
        values,
        usable,
        segment_counts,
        locals: locals_per_scale,
    };
    Ok(WithWarnings::new(surface, warnings))
}

/// Per-q log-log fit of F(q,s) against s. q values with fewer than three
/// usable scales are omitted and reported; it is an error only if no q
/// survives.
pub fn h_spectrum(
    surface: &FluctuationSurface,
    fit_range: Option<(f64, f64)>,
) -> Result<WithWarnings<SpectrumCurve>> {
    let mut q_out = Vec::new();
    let mut h_out = Vec::new();
    let mut diags = Vec::new();
    let mut warnings = Vec::new();

    for (qi, &q) in surface.q_values().iter().enumerate() {
        let points = surface.points_for(qi);
        match fit_loglog(&points, fit_range) {
            Ok(fit) => {
                q_out.push(q);
                h_out.push(fit.slope);
                diags.push(Some(fit));
            }
            Err(e) => warnings.push(format!("q={q} omitted: {e}")),
        }
    }

    if q_out.is_empty() {
        return Err(Error::QUnusable(
            "no q value had enough usable scales".into(),
        ));
    }
    let curve = SpectrumCurve::new(SpectrumKind::HOfQ, q_out, h_out, diags)?;
    Ok(WithWarnings::new(curve, warnings))
}

/// tau(q) = q h(q) - 1 pointwise; tau(0) = -1 exactly, as forced by the
/// formula with finite h.
pub fn tau_from_h(h: &SpectrumCurve) -> Result<SpectrumCurve> {
    if h.kind != SpectrumKind::HOfQ {
        return Err(Error::IncompatibleKinds {
            a: h.kind.to_string(),
            b: SpectrumKind::HOfQ.to_string(),
        });
    }
    let tau: Vec<f64> = h
        .abscissa()
        .iter()
        .zip(h.ordinate())
        .map(|(&q, &hv)| if q == 0.0 { -1.0 } else { q * hv - 1.0 })
        .collect();
    SpectrumCurve::new(
        SpectrumKind::TauOfQ,
        h.abscissa().to_vec(),
        tau,
        h.diagnostics().to_vec(),
    )
}

/// Classical rescaled-range analysis. Per scale, over disjoint windows: the
/// range of the demeaned cumulative sum divided by the window standard
/// deviation, averaged over windows; the Hurst exponent is the fitted slope
/// of R/S against s. Zero-variance windows are skipped and counted.
pub fn rescaled_range(
    series: &TimeSeries,
    scale_grid: &ScaleGrid,
) -> Result<WithWarnings<LogLogFit>> {
    if scale_grid.values()[0] < 8 {
        return Err(Error::InvalidParameter {
            name: "scale_grid",
            reason: format!(
                "rescaled range needs scales >= 8, got {}",
                scale_grid.values()[0]
            ),
        });
    }
    scale_grid.validate_for(series.len())?;

    let x = series.values();
    let mut points = Vec::with_capacity(scale_grid.len());
    let mut skipped = 0usize;
    let mut total_windows = 0usize;

    for &s in scale_grid.values() {
        let mut sum_rs = 0.0;
        let mut used = 0usize;
        for w in x.chunks_exact(s) {
            total_windows += 1;
            let mean = w.iter().sum::<f64>() / s as f64;
            let var = w.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / s as f64;
            if var <= 0.0 {
                skipped += 1;
                continue;
            }
            let mut acc = 0.0;
            let mut min = f64::INFINITY;
            let mut max = f64::NEG_INFINITY;
            for &v in w {
                acc += v - mean;
                min = min.min(acc);
                max = max.max(acc);
            }
            sum_rs += (max - min) / var.sqrt();
            used += 1;
        }
        if used > 0 {
            points.push((s as f64, sum_rs / used as f64));
        }
    }

    if points.is_empty() || skipped == total_windows {
        return Err(Error::NoUsableWindows);
    }
    let fit = fit_loglog(&points, None)?;
    let warnings = if skipped > 0 {
        vec![format!(
            "{skipped} window(s) skipped (zero standard deviation)"
        )]
    } else {
        Vec::new()
    };
    Ok(WithWarnings::new(fit, warnings))
}

/// Which estimator a rolling Hurst trace uses per window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RollingEstimator {
    /// DFA at q = 2 with linear detrending.
    DfaH2,
    /// Rescaled-range slope.
    Rs,
}

/// Applies the chosen estimator to each sliding window; one estimate per
/// window position, keyed by the window's end index. Degenerate windows
/// yield `None` rather than being dropped.
pub fn rolling_hurst(
    series: &TimeSeries,
    window: usize,
    step: usize,
    estimator: RollingEstimator,
) -> Result<Vec<(usize, Option<f64>)>> {
    if window < 256 {
        return Err(Error::InvalidParameter {
            name: "window",
            reason: format!("window must be at least 256, got {window}"),
        });
    }
    if window > series.len() {
        return Err(Error::InvalidParameter {
            name: "window",
            reason: format!("window {window} exceeds series length {}", series.len()),
        });
    }
    if step == 0 {
        return Err(Error::InvalidParameter {
            name: "step",
            reason: "step must be >= 1".into(),
        });
    }

    let scale_grid = ScaleGrid::log_spaced(8, window / 4, 10)?;
    let q_grid = QGrid::new(vec![2.0]).unwrap();

    let mut trace = Vec::new();
    let mut end = window;
    while end <= series.len() {
        let slice = &series.values()[end - window..end];
        let win = TimeSeries::new(slice.to_vec(), series.tick_lag.clone(), "window")
            .expect("window length >= 256");
        let estimate = match estimator {
            RollingEstimator::DfaH2 => {
                let cfg = DfaConfig::new(1, q_grid.clone(), scale_grid.clone());
                fluctuation_function(&win, &cfg)
                    .and_then(|surf| h_spectrum(&surf.value, None))
                    .ok()
                    .map(|h| h.value.ordinate()[0])
            }
            RollingEstimator::Rs => rescaled_range(&win, &scale_grid)
                .ok()
                .map(|f| f.value.slope),
        };
        trace.push((end, estimate));
        end += step;
    }
    Ok(trace)
}
