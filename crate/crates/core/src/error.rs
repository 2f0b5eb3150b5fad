use std::io;

use thiserror::Error;

/// Errors produced anywhere in the PIR-SPV stack.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument was outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient shares: need {need}, got {got}")]
    InsufficientShares { need: usize, got: usize },

    /// Reed-Solomon decoding could not find a polynomial within the error budget.
    #[error("decode failure: {0}")]
    DecodeFailure(String),

    /// A peer sent something that violates the wire or query contract.
    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("build error: {0}")]
    Build(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// Fetched data did not hash to the value it was requested under.
    #[error("integrity error: {0}")]
    Integrity(String),

    /// The server answered with an error frame.
    #[error("remote error: {0}")]
    Remote(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn protocol(msg: impl Into<String>) -> Self {
        Error::Protocol(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
