use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] lrdcp_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}, line {line}: {msg}")]
    Ingest { path: String, line: u64, msg: String },
    #[error("{0}")]
    Usage(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 3 for numerical failures, 2 for everything else.
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Core(e) if e.is_numerical() => ExitCode::from(3),
            _ => ExitCode::from(2),
        }
    }
}
