use std::io;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum LdirError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("zero vector has no direction")]
    ZeroVector,

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("k = {k} exceeds vector dimension {dim}")]
    KTooLarge { k: usize, dim: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot select {n} items out of {available}")]
    InvalidN { n: usize, available: usize },

    #[error("invalid k = {k} for {n} points")]
    InvalidK { k: usize, n: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("corpus too small: {available} texts available after filtering, {required} anchors requested")]
    CorpusTooSmall { required: usize, available: usize },

    #[error("provider unavailable: {0}")]
    ProviderUnavailable(String),

    #[error("no vector stored for text id {0:?}")]
    MissingText(String),

    #[error("duplicate id {0:?}")]
    DuplicateId(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("unsupported format version {found} (expected 1)")]
    VersionMismatch { found: u8 },

    #[error("encoder mismatch: anchor set was built with {expected}, got {found}")]
    EncoderMismatch { expected: String, found: String },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("no query has relevance judgements")]
    EmptyQrels,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl LdirError {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        LdirError::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = LdirError> = std::result::Result<T, E>;
