use thiserror::Error;

#[derive(Debug, Error)]
pub enum DwError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("time {t} outside the protocol interval [0, {tau}]")]
    TimeOutOfRange { t: f64, tau: f64 },
    #[error("level {level} has boundary amplitude {amplitude:.3e}; widen the grid")]
    BoundaryLeakage { level: usize, amplitude: f64 },
    #[error(
        "basis tracking failed at step {step}: overlap unitarity deficit {deficit:.3e} (grid or n_keep too small)"
    )]
    BasisTracking { step: usize, deficit: f64 },
    #[error("stepper failure at step {step}: {reason}")]
    Stepper { step: usize, reason: String },
    #[error("input state has weight {weight:.3e} outside the {dim} lowest levels")]
    OutsideSubspace { weight: f64, dim: usize },
    #[error("expected a {expected}x{expected} reduced state, found {found}x{found}")]
    Dimension { expected: usize, found: usize },
    #[error(transparent)]
    Core(#[from] thermops_core::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, DwError>;

impl From<DwError> for thermops_core::Error {
    fn from(e: DwError) -> Self {
        match e {
            DwError::Core(inner) => inner,
            other => thermops_core::Error::IntegrationFailure { time: f64::NAN, reason: other.to_string() },
        }
    }
}
