//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("unknown {kind} '{name}'")]
    UnknownEntity { kind: &'static str, name: String },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("bad model file: {0}")]
    Model(String),

    #[error("numerical divergence: {0}")]
    Diverged(String),
}

pub type Result<T> = std::result::Result<T, Error>;
