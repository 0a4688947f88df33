use std::io;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input in a line-oriented text format.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Structural problem in a binary or numeric file format.
    #[error("format error: {0}")]
    Format(String),

    /// No word survived the frequency cutoff.
    #[error("empty vocabulary: no word occurs at least {min_count} times")]
    EmptyVocabulary { min_count: u64 },

    /// Operands disagree on vector dimensionality.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A dictionary-driven step received no pairs to work with.
    #[error("empty dictionary")]
    EmptyDictionary,

    /// Nearest-neighbour retrieval against an empty candidate set.
    #[error("empty candidate matrix")]
    EmptyCandidates,

    /// Classifier training needs at least two distinct labels.
    #[error("training data contains a single class ({0})")]
    SingleClass(String),

    /// Paired sequences of different lengths.
    #[error("length mismatch: {left} golds vs {right} predictions")]
    LengthMismatch { left: usize, right: usize },

    /// Invalid run configuration.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
