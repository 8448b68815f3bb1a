use std::path::{Path, PathBuf};

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VERIFY_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const NUMERIC: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("model spec: {0}")]
    Spec(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {msg}")]
    Csv { path: PathBuf, msg: String },
    #[error(transparent)]
    Library(#[from] hazdep::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Spec(_) | CliError::Io { .. } | CliError::Csv { .. } => exit::USAGE,
            CliError::Library(e) => match e {
                hazdep::Error::InvalidParameter(_) | hazdep::Error::Structural(_) => exit::USAGE,
                hazdep::Error::Domain(_) | hazdep::Error::Numeric(_) | hazdep::Error::Capability(_) => exit::NUMERIC,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
