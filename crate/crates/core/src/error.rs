use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Chat { line: usize, message: String },

    #[error("tree parse error at offset {offset}: {message}")]
    Tree { offset: usize, message: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("unsupported audio format: {0}")]
    UnsupportedAudio(String),

    #[error("resource {path}: {message}")]
    Resource { path: PathBuf, message: String },

    #[error("configuration: {0}")]
    Config(String),

    #[error("data: {0}")]
    Data(String),

    #[error("registry mismatch: expected {expected}, found {found}")]
    RegistryMismatch { expected: String, found: String },

    #[error("did not converge: {0}")]
    Convergence(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Wav(#[from] hound::Error),
}

impl Error {
    pub(crate) fn data(message: impl Into<String>) -> Self {
        Error::Data(message.into())
    }

    pub(crate) fn resource(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Resource {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Convergence(_) => 4,
            Error::InvalidArgument(_) => 2,
            _ => 3,
        }
    }
}
