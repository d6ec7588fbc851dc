//! Multifractal scaling-exponent estimation for time series.
//!
//! Three pipelines that cross-check each other:
//!
//! * **partition-function analysis** ([`partition`]) — tau(q) and the
//!   generalized dimensions D(q) from box-measure moments;
//! * **MF-DFA** ([`mfdfa`]) — h(q) from generalized means of detrended
//!   segment fluctuations, with tau(q) = q h(q) - 1;
//! * **diffusion entropy analysis** ([`dea`]) — delta(q) from the growth of
//!   Renyi entropy of window-sum displacement distributions.
//!
//! The Legendre transform in [`spectrum`] connects tau(q) to the
//! singularity spectrum f(alpha); [`synth`] provides seeded generators with
//! closed-form spectra to verify all of the above.
//!
//! All estimators are pure functions of their inputs and are safe to call
//! concurrently.
//!
//! ```
//! use multifract::mfdfa::{fluctuation_function, h_spectrum, DfaConfig};
//! use multifract::synth::{generate, GeneratorModel, GeneratorSpec};
//! use multifract::{QGrid, ScaleGrid};
//!
//! let spec = GeneratorSpec { model: GeneratorModel::GaussianWhite, length: 1 << 12, seed: 7 };
//! let series = generate(&spec)?.series;
//!
//! let cfg = DfaConfig::new(
//!     1,
//!     QGrid::new(vec![-2.0, 0.0, 2.0])?,
//!     ScaleGrid::log_spaced(16, 512, 8)?,
//! );
//! let surface = fluctuation_function(&series, &cfg)?;
//! let h = h_spectrum(&surface.value, None)?;
//! // Uncorrelated increments diffuse: h(2) is near one half.
//! assert!((h.value.ordinate()[2] - 0.5).abs() < 0.1);
//! # Ok::<(), multifract::Error>(())
//! ```

pub mod dea;
pub mod error;
pub mod fit;
pub mod ingest;
pub mod mfdfa;
pub mod partition;
pub mod series;
pub mod spectrum;
pub mod synth;

pub use error::{Error, Result, WithWarnings};
pub use fit::{fit_loglog, fit_semilog, LogLogFit};
pub use series::{QGrid, ScaleGrid, TickLag, TimeSeries};
pub use spectrum::{
    compare_spectra, legendre_f_to_tau, legendre_tau_to_f, normalize_to_tau, SpectrumComparison,
    SpectrumCurve, SpectrumKind,
};
