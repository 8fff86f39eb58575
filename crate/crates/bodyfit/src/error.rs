//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed text input (mesh files, parameter files, images).
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A binary model container that cannot be decoded.
    #[error("corrupt model container: {0}")]
    Corrupt(String),

    #[error("config: {0}")]
    Config(String),

    #[error("empty mesh")]
    EmptyMesh,

    #[error("no foreground pixels in silhouette")]
    EmptySilhouette,

    /// Violated precondition or domain invariant.
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
