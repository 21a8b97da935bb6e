//! Error type shared by all modules.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by the calculator.
///
/// The split mirrors how callers are expected to react: `Parameter` means the
/// call itself was malformed (bad base, mismatched precisions), `Domain` means
/// the inputs were structurally valid but outside an operation's mathematical
/// domain (valuation of zero, expansion of a function not supported on the
/// units), `Unsupported` marks scalar rings an operation cannot work in, and
/// `Schema` covers serialization problems.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("schema error: {0}")]
    Schema(String),
}

impl Error {
    pub fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    pub fn schema(msg: impl Into<String>) -> Self {
        Error::Schema(msg.into())
    }
}
