use std::process::ExitCode;

use depthlab::DepthError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(DepthError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<DepthError> for CliError {
    /// Errors caused by the requested model, point or sizes are config
    /// errors; failures inside a computation are numeric.
    fn from(e: DepthError) -> Self {
        match e {
            DepthError::Quadrature { .. }
            | DepthError::DensityVanishes(_)
            | DepthError::MomentUnavailable(_)
            | DepthError::NoWitness(_) => CliError::Numeric(e),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) | CliError::Io(_) => ExitCode::from(2),
            CliError::Numeric(_) => ExitCode::from(3),
        }
    }
}
