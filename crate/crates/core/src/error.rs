//! Crate-wide error type.

use std::path::PathBuf;

/// Everything that can go wrong across meshing, streaming, tracking and I/O.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid element handle {0}")]
    InvalidHandle(String),

    #[error("dimension {0} outside supported range {1}")]
    DimensionRange(usize, &'static str),

    #[error("mesh construction: {0}")]
    Mesh(String),

    #[error("field/stream: {0}")]
    Field(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("numerical diagnostic: {0}")]
    Numerical(String),

    #[error("union-find is finalized; no further unions are accepted")]
    Finalized,

    #[error("format error in {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("unsupported schema version {0:?}")]
    Schema(String),

    #[error("i/o on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Format { path: path.into(), reason: reason.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
