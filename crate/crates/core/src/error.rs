use std::path::PathBuf;

use thiserror::Error;

/// Errors produced across the texture extraction and classification pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The GLCM marginal variance is zero, so correlation has no value.
    #[error("correlation undefined: gray-level variance is zero (constant image)")]
    UndefinedCorrelation,

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("feature configuration mismatch: model was built with {expected}, query uses {found}")]
    FingerprintMismatch { expected: String, found: String },

    #[error("day {0} is outside the labeled range 0..=5")]
    DayOutOfRange(i64),

    #[error("unsupported image: {0}")]
    UnsupportedImage(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    /// A record-level failure while reading a dataset file.
    #[error("line {line}: {source}")]
    Row {
        line: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("duplicate source id `{0}`")]
    DuplicateId(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// The innermost error, skipping row-location wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Row { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
