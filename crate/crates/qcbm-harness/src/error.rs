use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),

    #[error("output directory {dir} was produced by a different configuration: {detail}")]
    ManifestMismatch { dir: PathBuf, detail: String },

    #[error("corrupt state in {path}: {detail}")]
    CorruptState { path: PathBuf, detail: String },

    #[error("plot input error: {0}")]
    Plot(String),

    #[error("{failed} of {total} cells failed")]
    CellFailures { failed: usize, total: usize },

    #[error(transparent)]
    Core(#[from] qcbm::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

impl HarnessError {
    /// Process exit code: 1 for completed runs with failed cells, 2 for
    /// anything that prevented a clean run.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::CellFailures { .. } => 1,
            _ => 2,
        }
    }
}
