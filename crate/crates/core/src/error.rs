use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("eigendecomposition did not converge after {sweeps} sweeps")]
    NumericalFailure { sweeps: usize },

    #[error("matrix is not positive definite (smallest eigenvalue {smallest:e}, largest {largest:e})")]
    NotPositiveDefinite { smallest: f64, largest: f64 },

    #[error("index {index} out of range 1..={max}")]
    Index { index: usize, max: usize },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("center store is empty")]
    EmptyStore,

    #[error("invalid example: {0}")]
    InvalidExample(String),

    #[error("round {round}: {source}")]
    AtRound {
        round: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("phase {phase}, round {round}: {source}")]
    AtPhase {
        phase: usize,
        round: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid generator spec: {0}")]
    Spec(String),

    #[error("misaligned inputs: {0}")]
    Alignment(String),

    #[error("matrix format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
