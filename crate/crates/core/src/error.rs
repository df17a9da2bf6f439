use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("frame is empty")]
    EmptyFrame,

    #[error("frame has zero mean power")]
    ZeroPower,

    #[error("class index {0} is outside 0..53")]
    ClassOutOfRange(usize),

    #[error("class {name} ({index}) is not a {expected} class")]
    WrongFamily {
        index: usize,
        name: &'static str,
        expected: &'static str,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unknown dataset variant `{0}`")]
    UnknownVariant(String),

    #[error("output directory {0} is not empty (use force to overwrite)")]
    DirectoryNotEmpty(PathBuf),

    #[error("manifest missing in {0}")]
    ManifestMissing(PathBuf),

    #[error("digest mismatch for {file}: expected {expected}, found {found}")]
    DigestMismatch {
        file: String,
        expected: String,
        found: String,
    },

    #[error("dataset format error: {0}")]
    Format(String),

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
