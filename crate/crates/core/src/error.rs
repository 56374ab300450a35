use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("degenerate scatter task: {0}")]
    DegenerateTask(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("undefined performance: {0}")]
    UndefinedPerformance(String),

    #[error("undefined normalization: {0}")]
    UndefinedNormalization(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code for the CLI: 1 for configuration/usage problems,
    /// 2 for runtime invariant violations.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invariant(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
