use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the tracking library.
#[derive(Debug, Error)]
pub enum MscfError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// The response map has no usable maximum (non-positive or non-finite).
    /// Callers keep the previous state when they see this.
    #[error("degenerate response: {0}")]
    DegenerateResponse(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl MscfError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        MscfError::InvalidArgument(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        MscfError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        MscfError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, MscfError>;
