use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("self-loop requested at vertex {0}")]
    SelfLoop(usize),

    #[error("edge ({0}, {1}) already present")]
    DuplicateEdge(usize, usize),

    #[error("edge ({0}, {1}) not present")]
    MissingEdge(usize, usize),

    #[error("vertex {0} is isolated; normalized Laplacian is undefined")]
    IsolatedVertex(usize),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("eigensolver did not converge")]
    EigenFailure,

    #[error("density grids differ ({0} vs {1} points)")]
    GridMismatch(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("generator gave up after {attempts} attempts: {what}")]
    GeneratorExhausted { what: String, attempts: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
