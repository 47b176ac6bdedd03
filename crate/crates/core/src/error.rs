//! Error type shared across the library.

use thiserror::Error;

/// Errors produced by dissimilarity, clustering, evaluation, generation, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A shift length was requested that is not smaller than the series length.
    #[error("invalid shift: l = {shift} must be smaller than the series length {len}")]
    InvalidShift { shift: usize, len: usize },

    /// Two sequences that must have equal length do not.
    #[error("length mismatch: {left} vs {right}")]
    ShapeMismatch { left: usize, right: usize },

    /// A parameter violates its documented range or structure.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// An operation needs more data than it was given.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A dissimilarity matrix violates its invariants (symmetry, zero
    /// diagonal, finite nonnegative entries).
    #[error("invalid dissimilarity matrix: {0}")]
    InvalidMatrix(String),

    /// A text input could not be parsed; positions are 1-based.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
