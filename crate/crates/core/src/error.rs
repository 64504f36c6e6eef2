use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed input text. `line` is 1-based.
    #[error("{message} at line {line}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A data point cannot reach any center, so the clustering cost is infinite.
    #[error("vertex {vertex} is unreachable from every center (infinite cost)")]
    Unreachable { vertex: usize },

    /// The relative error is undefined because the reference cost is zero.
    #[error("empirical error undefined: cost(X, C) is zero")]
    UndefinedError,

    /// An exhaustive routine refused an instance that is too large.
    #[error("refusing exhaustive computation: {0}")]
    GuardExceeded(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArgument(message.into())
    }
}
