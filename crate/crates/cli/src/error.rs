use multifract::Error as CoreError;
use thiserror::Error;

/// Command-level error with the exit-code convention:
/// 1 usage, 2 data/validation, 3 numerical failure.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match &e {
            // Estimator could not produce a number from otherwise valid input.
            CoreError::NonPositiveScalingQuantity { .. }
            | CoreError::QUnusable(_)
            | CoreError::EmptySpectrum => CliError::Numerical(e.to_string()),
            // Everything else is a problem with the data or the request.
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(format!("json: {e}"))
    }
}
