use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("missing input file {path}: run `{needs}` first")]
    MissingFile { path: PathBuf, needs: &'static str },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("device `{device}` failed: {source}")]
    Device {
        device: String,
        #[source]
        source: thermops_core::Error,
    },

    #[error(transparent)]
    Core(#[from] thermops_core::Error),

    #[error(transparent)]
    DoubleWell(#[from] thermops_doublewell::DwError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 0 success, 2 validation failure, 3 device or integration failure,
    /// 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Device { .. } | CliError::DoubleWell(_) => 3,
            CliError::Core(thermops_core::Error::IntegrationFailure { .. }) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
