use std::path::PathBuf;

use thiserror::Error;

use crate::model::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite entry at position {0}")]
    NonFinite(usize),

    #[error("empty matrix or vector")]
    Empty,

    #[error("invalid problem: {0}")]
    Invalid(#[from] Violation),

    #[error("invalid option: {0}")]
    InvalidOption(String),

    #[error("starting point has a negative entry at {0}")]
    InfeasibleStart(usize),

    #[error("zero curvature estimate")]
    ZeroCurvature,

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
