use std::path::PathBuf;

use qca_core::QcaError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// The run specification is malformed; nothing was executed.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A computed quantity broke one of the library's invariants.
    #[error("numerical invariant violated: {0}")]
    Numerical(String),

    #[error(transparent)]
    Core(#[from] QcaError),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Validation(_) => 2,
            HarnessError::Io { .. } => 3,
            HarnessError::Numerical(_) | HarnessError::Core(_) => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
