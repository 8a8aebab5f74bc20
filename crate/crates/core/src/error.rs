//! Error type shared across the crate.

/// Errors reported by model construction, solvers and codecs.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("conditioning on a null event: {0}")]
    NullConditioning(String),

    #[error("mean matrix is not irreducible: {0}")]
    NotIrreducible(String),

    #[error("mean matrix is periodic with period {0}")]
    Periodic(usize),

    #[error("Malthusian parameter is -inf: {0}")]
    NoMalthusian(String),

    #[error("series value could not be certified: {0}")]
    Uncertified(String),

    #[error("numeric overflow in {0}")]
    Overflow(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("malformed contour path: {0}")]
    BadContour(String),

    #[error("life law is not samplable: {0}")]
    NotSamplable(String),

    #[error("iteration interrupted by the progress callback at step {0}")]
    Interrupted(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
