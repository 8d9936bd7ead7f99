use thiserror::Error;

/// Failures are split the same way the command line reports them:
/// bad input (exit code 2) versus a computation that did not succeed (exit code 1).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("computation failed: {0}")]
    Compute(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn compute(msg: impl Into<String>) -> Self {
        Error::Compute(msg.into())
    }

    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Invalid(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
