//! Seeded synthetic series with analytically known scaling properties, used
//! to verify the estimators in place of proprietary market data.
//!
//! # Random stream
//!
//! All randomness comes from one frozen, portable recipe so the same seed
//! reproduces the same series anywhere:
//!
//! * generator: ChaCha12 (`rand_chacha::ChaCha12Rng`), keyed with
//!   `seed_from_u64(seed)`;
//! * uniform in (0,1]: `((next_u64() >> 11) + 1) * 2^-53`;
//! * uniform in (0,1): `((next_u64() >> 11) as f64 + 0.5) * 2^-53`;
//! * standard normals: Box-Muller on consecutive uniforms,
//!   `sqrt(-2 ln u1) * (cos, sin)(2 pi u2)`, pairs consumed in order;
//! * cascade orientation bits: `next_u64() & 1`.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::BoxMeasure;
use crate::series::{QGrid, TickLag, TimeSeries};
use crate::spectrum::{SpectrumCurve, SpectrumKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "model")]
pub enum GeneratorModel {
    /// Independent standard normals.
    GaussianWhite,
    /// Cumulative sum of independent standard normals.
    Brownian,
    /// Fractional Gaussian noise with Hurst exponent `hurst`, synthesized by
    /// the exact conditional (Hosking) recursion on the fGn autocovariance.
    Fgn { hurst: f64 },
    /// Dyadic multiplicative cascade splitting mass a : 1-a at every node,
    /// with the left/right assignment drawn from the seeded stream. Emits the
    /// exact box masses of every level alongside the leaf-mass series.
    BinomialCascade { a: f64, depth: u32 },
    /// Symmetric alpha-stable variates of index `mu`, via the
    /// Chambers-Mallows-Stuck transform of seeded uniforms.
    Levy { mu: f64 },
}

impl GeneratorModel {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorModel::GaussianWhite => "gaussian_white",
            GeneratorModel::Brownian => "brownian",
            GeneratorModel::Fgn { .. } => "fgn",
            GeneratorModel::BinomialCascade { .. } => "binomial_cascade",
            GeneratorModel::Levy { .. } => "levy",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub model: GeneratorModel,
    /// Power of two, at least 2^10. For the cascade this must equal 2^depth.
    pub length: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.length < 1024 || !self.length.is_power_of_two() {
            return Err(Error::InvalidParameter {
                name: "length",
                reason: format!("must be a power of two >= 1024, got {}", self.length),
            });
        }
        match self.model {
            GeneratorModel::Fgn { hurst } => {
                if !(hurst > 0.0 && hurst < 1.0) {
                    return Err(Error::InvalidParameter {
                        name: "hurst",
                        reason: format!("H must be in (0,1), got {hurst}"),
                    });
                }
            }
            GeneratorModel::BinomialCascade { a, depth } => {
                if !(a > 0.5 && a < 1.0) {
                    return Err(Error::InvalidParameter {
                        name: "a",
                        reason: format!("cascade weight must be in (0.5,1), got {a}"),
                    });
                }
                if self.length != 1usize << depth {
                    return Err(Error::InvalidParameter {
                        name: "length",
                        reason: format!(
                            "cascade length must equal 2^depth = {}, got {}",
                            1usize << depth,
                            self.length
                        ),
                    });
                }
            }
            GeneratorModel::Levy { mu } if !(mu > 0.0 && mu <= 2.0) => {
                return Err(Error::InvalidParameter {
                    name: "mu",
                    reason: format!("stability index must be in (0,2], got {mu}"),
                });
            }
            _ => {}
        }
        Ok(())
    }
}

/// Output of [`generate`]: the series, plus the exact per-level box masses
/// when the model is a cascade.
#[derive(Debug, Clone)]
pub struct Generated {
    pub series: TimeSeries,
    pub cascade_measures: Option<Vec<BoxMeasure>>,
}

struct Stream {
    rng: ChaCha12Rng,
    spare_normal: Option<f64>,
}

impl Stream {
    fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha12Rng::seed_from_u64(seed),
            spare_normal: None,
        }
    }

    /// Uniform in (0, 1].
    fn uniform_oc(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in (0, 1), both endpoints excluded.
    fn uniform_open(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = self.uniform_oc();
        let u2 = self.uniform_open();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    fn bit(&mut self) -> bool {
        self.rng.next_u64() & 1 == 1
    }
}

/// Deterministic given the spec: identical specs produce bitwise-identical
/// series.
pub fn generate(spec: &GeneratorSpec) -> Result<Generated> {
    spec.validate()?;
    let mut stream = Stream::new(spec.seed);
    let n = spec.length;
    let label = format!("{}(seed={})", spec.model.name(), spec.seed);

    let (values, measures) = match spec.model {
        GeneratorModel::GaussianWhite => ((0..n).map(|_| stream.normal()).collect(), None),
        GeneratorModel::Brownian => {
            let mut acc = 0.0;
            let values = (0..n)
                .map(|_| {
                    acc += stream.normal();
                    acc
                })
                .collect();
            (values, None)
        }
        GeneratorModel::Fgn { hurst } => (hosking_fgn(hurst, n, &mut stream), None),
        GeneratorModel::BinomialCascade { a, depth } => {
            let levels = cascade_levels(a, depth, &mut stream);
            let series = levels.last().expect("depth >= 1").clone();
            let measures = levels
                .into_iter()
                .enumerate()
                .map(|(i, weights)| BoxMeasure::new(i as u32 + 1, weights))
                .collect::<Result<Vec<_>>>()?;
            (series, Some(measures))
        }
        GeneratorModel::Levy { mu } => {
            ((0..n).map(|_| cms_stable(mu, &mut stream)).collect(), None)
        }
    };

    Ok(Generated {
        series: TimeSeries::new(values, TickLag::ticks(), label)?,
        cascade_measures: measures,
    })
}

/// fGn autocovariance gamma(k) = 0.5 (|k+1|^2H - 2|k|^2H + |k-1|^2H).
pub fn fgn_autocovariance(hurst: f64, lag: usize) -> f64 {
    if lag == 0 {
        return 1.0;
    }
    let k = lag as f64;
    let two_h = 2.0 * hurst;
    0.5 * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).powf(two_h))
}

/// Exact conditional synthesis: each sample is drawn from the conditional
/// Gaussian given all predecessors, with coefficients maintained by the
/// Durbin-Levinson recursion. O(N^2) time, O(N) memory.
///
/// `psi[j]` holds the regression coefficient of x[j] in E[x_n | x_0..x_{n-1}];
/// keeping the reversed copy `rpsi` alongside makes the recursion a single
/// forward pass per step: the coefficient update, the reflection numerator
/// for the next step, and the conditional mean are all accumulated in one
/// loop (4-lane accumulators, since one add chain per element is what made
/// the naive loop latency-bound).
fn hosking_fgn(hurst: f64, n: usize, stream: &mut Stream) -> Vec<f64> {
    let gamma: Vec<f64> = (0..n).map(|k| fgn_autocovariance(hurst, k)).collect();

    let mut x = Vec::with_capacity(n);
    x.push(stream.normal());

    let mut psi = vec![0.0f64; n];
    let mut rpsi = vec![0.0f64; n];
    let mut psi_next = vec![0.0f64; n];
    let mut rpsi_next = vec![0.0f64; n];
    let mut variance = 1.0_f64;
    // Carried numerator: sum_j psi[j] * gamma[j+1] for the current psi.
    let mut reflect_acc = 0.0_f64;

    for step in 1..n {
        let m = step - 1; // coefficients carried over from the previous step
        let phi_nn = (gamma[step] - reflect_acc) / variance;

        psi_next[0] = phi_nn;
        rpsi_next[m] = phi_nn;
        let mut ag = [0.0f64; 4];
        let mut am = [0.0f64; 4];
        let m4 = m - m % 4;
        {
            let chunks = psi_next[1..1 + m4]
                .chunks_exact_mut(4)
                .zip(rpsi_next[..m4].chunks_exact_mut(4))
                .zip(psi[..m4].chunks_exact(4))
                .zip(rpsi[..m4].chunks_exact(4))
                .zip(gamma[2..2 + m4].chunks_exact(4))
                .zip(x[1..1 + m4].chunks_exact(4));
            for (((((pn, rn), pc), rc), gc), xc) in chunks {
                for k in 0..4 {
                    let p = pc[k];
                    let r = rc[k];
                    let v = p - phi_nn * r;
                    pn[k] = v;
                    rn[k] = r - phi_nn * p;
                    ag[k] += v * gc[k];
                    am[k] += v * xc[k];
                }
            }
        }
        for j in m4..m {
            let p = psi[j];
            let r = rpsi[j];
            let v = p - phi_nn * r;
            psi_next[j + 1] = v;
            rpsi_next[j] = r - phi_nn * p;
            ag[0] += v * gamma[j + 2];
            am[0] += v * x[j + 1];
        }
        reflect_acc = phi_nn * gamma[1] + (ag[0] + ag[1]) + (ag[2] + ag[3]);
        let mean = phi_nn * x[0] + (am[0] + am[1]) + (am[2] + am[3]);

        std::mem::swap(&mut psi, &mut psi_next);
        std::mem::swap(&mut rpsi, &mut rpsi_next);

        variance *= 1.0 - phi_nn * phi_nn;
        // Rounding can nick the variance slightly negative once the
        // conditional variance has converged; clamp, never sqrt a negative.
        variance = variance.max(0.0);

        x.push(mean + variance.sqrt() * stream.normal());
    }
    x
}

/// Box masses of every level 1..=depth. Each node splits its mass into
/// (a, 1-a) or (1-a, a) according to one stream bit per node.
fn cascade_levels(a: f64, depth: u32, stream: &mut Stream) -> Vec<Vec<f64>> {
    let mut masses = vec![1.0_f64];
    let mut levels = Vec::with_capacity(depth as usize);
    for _ in 0..depth {
        let mut next = Vec::with_capacity(masses.len() * 2);
        for &m in &masses {
            let (left, right) = if stream.bit() {
                (a, 1.0 - a)
            } else {
                (1.0 - a, a)
            };
            next.push(m * left);
            next.push(m * right);
        }
        masses = next;
        levels.push(masses.clone());
    }
    levels
}

/// Chambers-Mallows-Stuck transform for a symmetric alpha-stable variate of
/// index `mu`, unit scale. Reduces to tan(V) at mu = 1 (Cauchy) and to a
/// Gaussian of variance 2 at mu = 2.
fn cms_stable(mu: f64, stream: &mut Stream) -> f64 {
    let v = std::f64::consts::PI * (stream.uniform_open() - 0.5);
    let w = -stream.uniform_oc().ln();
    if (mu - 1.0).abs() < 1e-12 {
        return v.tan();
    }
    let s = (mu * v).sin() / v.cos().powf(1.0 / mu);
    let t = ((v - mu * v).cos() / w).powf((1.0 - mu) / mu);
    s * t
}

/// Closed-form cascade mass exponent tau(q) = -log2(a^q + (1-a)^q).
pub fn analytic_tau_cascade(a: f64, q_grid: &QGrid) -> Result<SpectrumCurve> {
    if !(a > 0.5 && a < 1.0) {
        return Err(Error::InvalidParameter {
            name: "a",
            reason: format!("cascade weight must be in (0.5,1), got {a}"),
        });
    }
    let tau: Vec<f64> = q_grid
        .values()
        .iter()
        .map(|&q| {
            let t = -(a.powf(q) + (1.0 - a).powf(q)).log2();
            t + 0.0 // normalise -0.0 at q = 1
        })
        .collect();
    SpectrumCurve::bare(SpectrumKind::TauOfQ, q_grid.values().to_vec(), tau)
}
