use std::io;
use std::path::PathBuf;

use designrank_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("{0}")]
    Usage(String),

    #[error("invalid record: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    CheckFailed(String),

    #[error("thread pool: {0}")]
    Threads(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    /// 2 validation, 3 not a design or unital, 4 size guard.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(CoreError::NotADesign(_) | CoreError::NotAUnital(_)) => 3,
            CliError::Core(CoreError::SizeGuard { .. }) => 4,
            _ => 2,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(line: usize, message: impl Into<String>) -> Self {
        CliError::Format {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
