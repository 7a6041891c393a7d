//! Error type shared by every module.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("format error in {path}: {msg}")]
    Format { path: PathBuf, msg: String },

    #[error("sphere packing failed after {attempts} attempts ({placed} of {requested} placed)")]
    Packing {
        attempts: u64,
        placed: usize,
        requested: usize,
    },

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("config error at `{field}`: {msg}")]
    Config { field: String, msg: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn format(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            msg: msg.into(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidArgument(_) | Error::OutOfRange(_) => 2,
            Error::Numerical(_) | Error::Packing { .. } | Error::Degenerate(_) => 3,
            Error::Io { .. } | Error::Format { .. } => 4,
        }
    }
}
