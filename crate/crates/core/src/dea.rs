//! Diffusion entropy analysis: the fluctuation collection algorithm,
//! histogram construction under selectable bin-width rules, Renyi entropy
//! estimation, and the delta(q) entropy-scaling exponents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, WithWarnings};
use crate::fit::{fit_semilog, LogLogFit};
use crate::series::{QGrid, ScaleGrid, TimeSeries};
use crate::spectrum::{SpectrumCurve, SpectrumKind};

/// Displacement samples per window length t, built from overlapping windows:
/// X_j(t) = sum of t consecutive increments starting at j.
#[derive(Debug, Clone)]
pub struct DiffusionEnsemble {
    window_lengths: Vec<usize>,
    displacements: Vec<Vec<f64>>,
}

impl DiffusionEnsemble {
    pub fn window_lengths(&self) -> &[usize] {
        &self.window_lengths
    }

    pub fn displacements(&self, index: usize) -> &[f64] {
        &self.displacements[index]
    }
}

/// Collects the displacement ensemble over every window position
/// (overlapping, no normalisation): one multiset of N - t + 1 values per
/// window length t.
pub fn collect_fluctuations(
    increments: &TimeSeries,
    scale_grid: &ScaleGrid,
) -> Result<DiffusionEnsemble> {
    scale_grid.validate_for(increments.len())?;
    let x = increments.values();
    let n = x.len();

    // Prefix sums make each window sum a single subtraction.
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &v in x {
        acc += v;
        prefix.push(acc);
    }

    let mut displacements = Vec::with_capacity(scale_grid.len());
    for &t in scale_grid.values() {
        let xs: Vec<f64> = (0..=n - t).map(|j| prefix[j + t] - prefix[j]).collect();
        debug_assert_eq!(xs.len(), n - t + 1);
        displacements.push(xs);
    }
    Ok(DiffusionEnsemble {
        window_lengths: scale_grid.values().to_vec(),
        displacements,
    })
}

/// Histogram bin-selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule", content = "value")]
pub enum BinRule {
    /// ceil(1 + log2 n) bins.
    Sturges,
    /// Width 3.4908 sigma n^(-1/3) (Gaussian-reference optimum).
    Scott,
    /// Width 2 IQR n^(-1/3); IQR-based, robust to heavy tails.
    FreedmanDiaconis,
    FixedWidth(f64),
    FixedCount(usize),
}

impl std::fmt::Display for BinRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BinRule::Sturges => write!(f, "sturges"),
            BinRule::Scott => write!(f, "scott"),
            BinRule::FreedmanDiaconis => write!(f, "fd"),
            BinRule::FixedWidth(w) => write!(f, "width={w}"),
            BinRule::FixedCount(k) => write!(f, "count={k}"),
        }
    }
}

/// Scott's published constant for the Gaussian-optimal bin width.
pub const SCOTT_FACTOR: f64 = 3.4908;

/// Summary statistics a bin rule works from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSummary {
    pub n: usize,
    pub stdev: f64,
    pub iqr: f64,
    pub range: f64,
}

/// Either a bin width or a bin count, depending on the rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BinSpec {
    Width(f64),
    Count(usize),
}

/// Evaluates a bin rule on a sample summary.
pub fn bin_count(rule: &BinRule, summary: &SampleSummary) -> Result<BinSpec> {
    if summary.n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("need at least 2 samples, got {}", summary.n),
        });
    }
    let n = summary.n as f64;
    match rule {
        BinRule::Sturges => Ok(BinSpec::Count((1.0 + n.log2()).ceil() as usize)),
        BinRule::Scott => {
            if summary.stdev <= 0.0 {
                return Err(Error::DegenerateSample("zero standard deviation".into()));
            }
            Ok(BinSpec::Width(SCOTT_FACTOR * summary.stdev / n.cbrt()))
        }
        BinRule::FreedmanDiaconis => {
            if summary.iqr <= 0.0 {
                return Err(Error::DegenerateSample("zero interquartile range".into()));
            }
            Ok(BinSpec::Width(2.0 * summary.iqr / n.cbrt()))
        }
        BinRule::FixedWidth(w) => {
            if !(*w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "width",
                    reason: format!("must be positive, got {w}"),
                });
            }
            Ok(BinSpec::Width(*w))
        }
        BinRule::FixedCount(k) => {
            if *k < 2 {
                return Err(Error::InvalidParameter {
                    name: "count",
                    reason: format!("need at least 2 bins, got {k}"),
                });
            }
            Ok(BinSpec::Count(*k))
        }
    }
}

/// A realized uniform-width histogram: the rule that built it, the bin
/// edges, and the counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub rule: BinRule,
    edges: Vec<f64>,
    counts: Vec<u64>,
    width: f64,
}

impl Histogram {
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    /// Realized uniform bin width.
    pub fn bin_width(&self) -> f64 {
        self.width
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Occupancy probabilities of the non-empty bins.
    pub fn occupied_probabilities(&self) -> Vec<f64> {
        let total = self.total() as f64;
        self.counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| c as f64 / total)
            .collect()
    }
}

/// Sample standard deviation (n - 1 denominator) and interquartile range
/// (linear interpolation between order statistics).
fn summarize(samples: &[f64]) -> SampleSummary {
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let ss: f64 = samples.iter().map(|&v| (v - mean) * (v - mean)).sum();
    let stdev = if n > 1 {
        (ss / (n - 1) as f64).sqrt()
    } else {
        0.0
    };

    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let quantile = |p: f64| -> f64 {
        let pos = p * (n - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        if lo == hi {
            sorted[lo]
        } else {
            sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
        }
    };
    let iqr = quantile(0.75) - quantile(0.25);
    let range = sorted[n - 1] - sorted[0];
    SampleSummary {
        n,
        stdev,
        iqr,
        range,
    }
}

/// Bins samples into uniform-width bins spanning [min, max]: right-open
/// except the last, with the width or count supplied by the rule.
pub fn histogram(samples: &[f64], rule: &BinRule) -> Result<Histogram> {
    if samples.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: format!("need at least 2 samples, got {}", samples.len()),
        });
    }
    let summary = summarize(samples);
    if summary.range <= 0.0 {
        return Err(Error::DegenerateSample("all samples identical".into()));
    }
    let bins = match bin_count(rule, &summary)? {
        BinSpec::Count(k) => k.max(2),
        BinSpec::Width(w) => ((summary.range / w).ceil() as usize).max(2),
    };

    let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (max - min) / bins as f64;
    let mut edges: Vec<f64> = (0..=bins).map(|i| min + i as f64 * width).collect();
    edges[bins] = max;

    let mut counts = vec![0u64; bins];
    for &x in samples {
        let idx = (((x - min) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(Histogram {
        rule: *rule,
        edges,
        counts,
        width,
    })
}

/// Renyi entropy of a discrete distribution, natural log:
/// S_q = ln(sum p^q) / (1 - q), with the Shannon limit at q = 1.
/// Empty bins are dropped (0^q = 0 for q > 0).
pub fn renyi_discrete(probabilities: &[f64], q: f64) -> Result<f64> {
    if probabilities.is_empty() {
        return Err(Error::InvalidParameter {
            name: "histogram",
            reason: "empty histogram".into(),
        });
    }
    if (q - 1.0).abs() < 1e-9 {
        return Ok(-probabilities
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.ln())
            .sum::<f64>());
    }
    let sum: f64 = probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p.powf(q))
        .sum();
    Ok(sum.ln() / (1.0 - q))
}

/// Differential Renyi entropy estimate of a histogram: the discrete entropy
/// of the bin occupancies plus ln(bin width), so the value tracks the
/// continuous density and the entropy-scaling slope is bin-rule independent
/// at leading order.
///
/// Negative q is rejected here; sparse bins make p^q explode for q < 0. Use
/// [`renyi_entropy_any_q`] to force it.
pub fn renyi_entropy(hist: &Histogram, q: f64) -> Result<f64> {
    if q < 0.0 {
        return Err(Error::InvalidParameter {
            name: "q",
            reason: format!("negative q ({q}) excluded by default; use the force flag"),
        });
    }
    renyi_entropy_any_q(hist, q)
}

/// Same estimate without the q >= 0 guard.
pub fn renyi_entropy_any_q(hist: &Histogram, q: f64) -> Result<f64> {
    if hist.total() == 0 {
        return Err(Error::InvalidParameter {
            name: "histogram",
            reason: "empty histogram".into(),
        });
    }
    Ok(renyi_discrete(&hist.occupied_probabilities(), q)? + hist.bin_width().ln())
}

/// Entropy-vs-window-length scaling for one q: the points, the semi-log fit
/// S_q(t) = B_q + delta(q) ln t, and the extracted exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyScaling {
    pub q: f64,
    /// (t, S_q(t)) pairs that entered the fit.
    pub entropy_points: Vec<(f64, f64)>,
    pub fit: LogLogFit,
    /// The slope delta(q).
    pub delta: f64,
    /// B_q (A when q = 1).
    pub intercept: f64,
}

/// The delta(q) curve plus the per-q scaling detail behind each point.
#[derive(Debug, Clone)]
pub struct DeltaSpectrum {
    pub curve: SpectrumCurve,
    pub per_q: Vec<EntropyScaling>,
}

/// Per window length: histogram the displacements under `rule`; per q: the
/// entropy S_q(t); then fit S_q(t) = B_q + delta(q) ln t. The fit is
/// semi-log — entropy against ln t.
///
/// q values with fewer than three finite entropy points are omitted and
/// reported; window lengths with degenerate histograms likewise.
pub fn delta_spectrum(
    ensemble: &DiffusionEnsemble,
    q_grid: &QGrid,
    rule: &BinRule,
    allow_negative_q: bool,
) -> Result<WithWarnings<DeltaSpectrum>> {
    if ensemble.window_lengths.len() < 3 {
        return Err(Error::InsufficientScales {
            available: ensemble.window_lengths.len(),
            required: 3,
        });
    }

    let mut warnings = Vec::new();
    let mut histograms: Vec<(usize, Histogram)> = Vec::new();
    for (i, &t) in ensemble.window_lengths.iter().enumerate() {
        match histogram(&ensemble.displacements[i], rule) {
            Ok(h) => histograms.push((t, h)),
            Err(e) => warnings.push(format!("t={t} omitted: {e}")),
        }
    }
    if histograms.len() < 3 {
        return Err(Error::DegenerateSample(format!(
            "only {} of {} window lengths produced a histogram",
            histograms.len(),
            ensemble.window_lengths.len()
        )));
    }

    let mut q_out = Vec::new();
    let mut delta_out = Vec::new();
    let mut diags = Vec::new();
    let mut per_q = Vec::new();
    for &q in q_grid.values() {
        if q < 0.0 && !allow_negative_q {
            warnings.push(format!(
                "q={q} omitted: negative q disabled (pass the force flag)"
            ));
            continue;
        }
        let points: Vec<(f64, f64)> = histograms
            .iter()
            .filter_map(|(t, h)| {
                renyi_entropy_any_q(h, q)
                    .ok()
                    .filter(|s| s.is_finite())
                    .map(|s| (*t as f64, s))
            })
            .collect();
        if points.len() < 3 {
            warnings.push(format!(
                "q={q} omitted: only {} finite entropy point(s)",
                points.len()
            ));
            continue;
        }
        match fit_semilog(&points, None) {
            Ok(fit) => {
                q_out.push(q);
                delta_out.push(fit.slope);
                diags.push(Some(fit.clone()));
                per_q.push(EntropyScaling {
                    q,
                    entropy_points: points,
                    delta: fit.slope,
                    intercept: fit.intercept,
                    fit,
                });
            }
            Err(e) => warnings.push(format!("q={q} omitted: {e}")),
        }
    }

    if q_out.is_empty() {
        return Err(Error::QUnusable(
            "no q value produced an entropy scaling fit".into(),
        ));
    }
    let curve = SpectrumCurve::new(SpectrumKind::DeltaOfQ, q_out, delta_out, diags)?;
    Ok(WithWarnings::new(DeltaSpectrum { curve, per_q }, warnings))
}
