use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("numerical range exceeded: {0}")]
    NumericalRange(String),

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("FCIDUMP parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("projection onto the ancilla |0> subspace has norm {0:.3e}")]
    DegenerateProjection(f64),

    #[error("state is not normalized (norm {0:.15})")]
    NotNormalized(f64),

    #[error("ill-conditioned reconstruction: {0}")]
    IllConditioned(String),

    #[error("missing compiled operator: {0}")]
    MissingOperator(String),

    #[error("library error: {0}")]
    Library(String),

    #[error("missing fixture: {0}")]
    MissingFixture(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
