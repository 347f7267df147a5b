use thiserror::Error;

/// Errors raised by the library. Validation failures of atoms are not
/// errors; they are reported through [`crate::atoms::ValidationReport`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("construction failed: {0}")]
    Construction(String),

    /// The function fails a necessary condition for membership at the
    /// current truncation (divergent global functional or maximal norm).
    #[error("not in H1(gamma) at this truncation: {0}")]
    NotInHardySpace(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
