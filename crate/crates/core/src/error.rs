use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {dim}: {reason}")]
    InvalidDimension { dim: usize, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("composite bases can only be built from full-space bases")]
    UnsupportedComposition,

    #[error("invalid projector set: {0}")]
    InvalidProjector(String),

    #[error("invalid operator basis: {0}")]
    InvalidBasis(String),

    #[error("state has support outside the basis subspace (deviation {deviation:.3e})")]
    OutOfSubspace { deviation: f64 },

    #[error("not a physical state: minimum eigenvalue {min_eigenvalue:.3e}")]
    NonPhysicalState { min_eigenvalue: f64 },

    #[error("matrix is not a density matrix: {0}")]
    InvalidState(String),

    #[error("test inputs are linearly dependent (smallest singular value {smallest_singular_value:.3e}); near-null combination {combination:?}")]
    DependentInputs { smallest_singular_value: f64, combination: Vec<f64> },

    #[error("incomplete ensemble: {0}")]
    IncompleteEnsemble(String),

    #[error("propagator is not unitary (deviation {deviation:.3e})")]
    InvalidPropagator { deviation: f64 },

    #[error("operator is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("relative entropy is infinite: first argument has weight {weight:.3e} outside the support of the second")]
    SupportMismatch { weight: f64 },

    #[error("reference state is not positive definite: minimum eigenvalue {min_eigenvalue:.3e}")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("integration failed at t = {time}: {reason}")]
    IntegrationFailure { time: f64, reason: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
