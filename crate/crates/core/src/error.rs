use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A growth rate is zero, so the species cannot be classified as growing
    /// or declining.
    #[error("degenerate model: {0}")]
    ModelDegenerate(String),

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}
