use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input that violates an operation's precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("malformed page {slug:?}: {reason}")]
    MalformedPage { slug: String, reason: String },

    /// A record or document did not match the expected schema.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("ambiguous title normalization: {0}")]
    Ambiguous(String),

    /// Conflicting entries in a curation file.
    #[error("curation file conflict: {0}")]
    Curation(String),

    #[error("perfect separation or singular information matrix at column {column}")]
    Separation { column: String },

    /// The computation is mathematically undefined for the given data.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("transport error: {0}")]
    Transport(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub fn is_transport(&self) -> bool {
        matches!(self, Error::Transport(_))
    }
}
