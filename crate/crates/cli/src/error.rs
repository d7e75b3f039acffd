use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("line {line}: {message}")]
    IllegalInstruction { line: usize, message: String },

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("EPT_DENSE_CAP must be a positive integer, got '{0}'")]
    DenseCap(String),

    #[error(transparent)]
    Core(#[from] ept_core::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    /// 2 when a size cap was hit, 1 for every other failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_cap_exceeded() => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
