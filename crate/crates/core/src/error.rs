use std::path::Path;

/// Errors produced by instance construction, evaluation, and analysis.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid solution: {0}")]
    InvalidSolution(String),

    /// A computation was refused because it would exceed a hard resource
    /// limit (memory budget, exponential term count).
    #[error("refused: {0}")]
    Refused(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("parse error in {path}: {msg}")]
    Parse { path: String, msg: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub(crate) fn parse(path: &Path, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.display().to_string(),
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
