use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A model violates a structural requirement (recurrence, rates, ...).
    #[error("model error: {0}")]
    Model(String),
    /// A query lies outside the range covered by the sample.
    #[error("range error: {0}")]
    Range(String),
    /// An object is in the wrong state for the requested operation.
    #[error("state error: {0}")]
    State(String),
    /// The configuration is valid but not supported by the implementation.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    /// Not enough data to compute the requested statistic.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
