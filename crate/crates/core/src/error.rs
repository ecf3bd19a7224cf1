use std::io;

use thiserror::Error;

/// Errors raised by the transform, estimator and harness layers.
///
/// The variants line up with the process exit codes used by the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("invariant failure [{name}]: {detail}")]
    Invariant { name: String, detail: String },
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub fn invariant(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Invariant {
            name: name.into(),
            detail: detail.into(),
        }
    }

    /// Process exit code: 2 config, 3 data, 4 invariant failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Json(_) => 2,
            Error::Data(_) | Error::Numerical(_) | Error::Io(_) | Error::Csv(_) => 3,
            Error::Invariant { .. } => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
