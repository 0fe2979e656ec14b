use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("path does not exist: {0}")]
    MissingPath(PathBuf),

    #[error("zero parsable videos in {0}")]
    NoVideos(PathBuf),

    #[error("duplicate video_id {0}")]
    DuplicateVideo(String),

    #[error("invalid record: {0}")]
    InvalidRecord(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("video {0} has no label")]
    Unlabeled(String),

    #[error("training data contains a single class")]
    SingleClass,

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("training diverged at epoch {epoch} (loss {loss}, learning rate {learning_rate})")]
    Diverged {
        epoch: usize,
        loss: f64,
        learning_rate: f64,
    },

    #[error("walk path references unknown node {0}")]
    UnknownNode(usize),

    #[error("model artifact error: {0}")]
    Model(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
