use thiserror::Error;

/// Errors produced by the estimators and their supporting machinery.
#[derive(Debug, Error)]
pub enum Error {
    #[error("series too short: {len} values, need at least {min}")]
    SeriesTooShort { len: usize, min: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A scaling statistic came out zero or negative, so its logarithm is
    /// undefined. Usually means an estimator produced a degenerate value
    /// (e.g. an empty segment) rather than a bad input.
    #[error("non-positive scaling quantity at scale {scale}")]
    NonPositiveScalingQuantity { scale: f64 },

    #[error("insufficient scales: {available} usable point(s), need at least {required}")]
    InsufficientScales { available: usize, required: usize },

    #[error("empty spectrum")]
    EmptySpectrum,

    #[error("q unusable: {0}")]
    QUnusable(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("no usable windows: every window had zero standard deviation")]
    NoUsableWindows,

    #[error("null measure: total mass is zero")]
    NullMeasure,

    #[error("no overlap between spectrum abscissae")]
    NoOverlap,

    #[error("incompatible spectrum kinds: {a} vs {b}")]
    IncompatibleKinds { a: String, b: String },

    #[error("column {0} not found in input")]
    MissingColumn(String),

    #[error("non-positive value at index {index}: log returns require positive values")]
    NonPositiveLogReturn { index: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv parse error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// A computed value together with the non-fatal problems encountered while
/// producing it (excluded cells, omitted q values, concavity violations).
/// Callers surface these instead of silently dropping them.
#[derive(Debug, Clone)]
pub struct WithWarnings<T> {
    pub value: T,
    pub warnings: Vec<String>,
}

impl<T> WithWarnings<T> {
    pub fn clean(value: T) -> Self {
        Self {
            value,
            warnings: Vec::new(),
        }
    }

    pub fn new(value: T, warnings: Vec<String>) -> Self {
        Self { value, warnings }
    }
}
