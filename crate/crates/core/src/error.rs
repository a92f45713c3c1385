use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("no mask outcome for record `{0}`")]
    MissingMask(String),

    #[error("need at least {needed} identities, found {available}")]
    NotEnoughIdentities { needed: usize, available: usize },

    #[error("label {0} occurs only once in the batch")]
    SingletonLabel(u64),

    #[error("batch contains a single identity")]
    SingleIdentity,

    #[error("empty admissible gallery")]
    EmptyGallery,

    #[error("no relevant gallery entries for this query")]
    NoRelevant,

    #[error("no query has a relevant gallery entry")]
    NoScorableQueries,

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn dims(expected: impl ToString, actual: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            actual: actual.to_string(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
