use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected} entries, got {got}")]
    Dimension { expected: usize, got: usize },

    /// The problem is too large for exact evaluation.
    #[error("capacity exceeded: {what} is {got}, limit is {limit}{hint}")]
    Capacity {
        what: &'static str,
        got: usize,
        limit: usize,
        hint: &'static str,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The closed-form allocation does not exist and the numeric fallback
    /// was disabled.
    #[error("closed form infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
