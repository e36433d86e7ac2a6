use std::io;
use std::path::PathBuf;

use fhtgibbs_core::Error as CoreError;

use crate::formats::FormatError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    #[error("{path}: {source}")]
    Format { path: PathBuf, source: FormatError },

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for numerical aborts, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if is_numerical(e) => 2,
            _ => 1,
        }
    }
}

fn is_numerical(e: &CoreError) -> bool {
    match e {
        CoreError::NonFinite { .. }
        | CoreError::Diverged { .. }
        | CoreError::Singular { .. }
        | CoreError::Degenerate(_) => true,
        CoreError::AtNode { source, .. } => is_numerical(source),
        _ => false,
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
