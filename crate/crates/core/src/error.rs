use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the simulate → acquire → extract → analyze chain.
#[derive(Error, Debug)]
pub enum Error {
    /// A parameter violates an operation's precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The input data is unusable for the requested operation (too short, empty, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A specific sample in the input is malformed.
    #[error("bad sample at index {index}: {reason}")]
    Data { index: usize, reason: String },

    /// A statistic would divide by a zero variance.
    #[error("degenerate variance: {0}")]
    DegenerateVariance(String),

    /// A configuration file could not be interpreted.
    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// An error raised inside a named pipeline stage.
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Wraps `self` with the name of the pipeline stage it came from.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid_param(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn invalid_input(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
