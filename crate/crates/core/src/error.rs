use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("states live on different grids")]
    GridMismatch,

    #[error("profile is discontinuous at the vertex: edge {edge} starts at {value} but edge 0 starts at {reference}")]
    VertexMismatch {
        edge: usize,
        value: String,
        reference: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operation is undefined on the zero state")]
    ZeroState,

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("minimization diverged: action increased for {0} consecutive steps")]
    Divergence(usize),

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
