use std::io;

use thiserror::Error;

/// Errors produced by the sketching library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// `get_next_balls` was called on a process with no empty bins left.
    #[error("process for element {0} is exhausted (no empty bins left)")]
    ExhaustedProcess(u64),

    #[error("vector has no positive elements")]
    NoPositiveElements,

    #[error("sketch register {0} is unfilled")]
    IncompleteSketch(usize),

    #[error("incompatible sketches: {0}")]
    IncompatibleSketch(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("sketch file format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
