use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation
    /// (negative SNR, non-positive noise variance, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A structural parameter is invalid (length mismatch, too few samples,
    /// malformed alphabet, ...).
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// A code or link configuration is inconsistent.
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn parameter<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
