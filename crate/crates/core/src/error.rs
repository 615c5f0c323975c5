use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("edge ({u}, {v}) references a node outside [0, {num_nodes})")]
    EdgeOutOfRange { u: usize, v: usize, num_nodes: usize },

    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: expected {expected} rows, found {found}", path.display())]
    RowCount {
        path: PathBuf,
        expected: usize,
        found: usize,
    },

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("shape mismatch at layer {layer}: {message}")]
    Shape { layer: usize, message: String },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("snapshot error: {0}")]
    Snapshot(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
