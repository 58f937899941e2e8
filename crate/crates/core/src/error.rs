use thiserror::Error;

/// Error type shared by the simulation library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum CoreError {
    /// An argument fell outside the mathematical domain of an operation,
    /// e.g. a Bernoulli probability outside `[0, 1]`.
    #[error("domain error: {0}")]
    Domain(String),

    /// An experiment configuration failed validation. The message names
    /// the offending field.
    #[error("configuration error: {0}")]
    Config(String),

    /// An internal contract was violated (out-of-range arm index, unknown
    /// variant, missing checkpoint).
    #[error("internal error: {0}")]
    Internal(String),
}

impl CoreError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        CoreError::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        CoreError::Config(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        CoreError::Internal(msg.into())
    }
}
