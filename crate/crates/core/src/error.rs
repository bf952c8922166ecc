use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("self-loop on node {node} (line {line})")]
    SelfLoop { node: usize, line: usize },

    #[error("node index {index} out of range for {n} nodes (line {line})")]
    IndexOutOfRange { index: usize, n: usize, line: usize },

    #[error("duplicate edge ({u}, {v}) (line {line})")]
    DuplicateEdge { u: usize, v: usize, line: usize },

    #[error("invalid edge weight {weight} on ({u}, {v})")]
    InvalidWeight { u: usize, v: usize, weight: f64 },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("graph has no edges")]
    EmptyEdgeSet,

    #[error("instance too large for exhaustive search: n = {n} > {max}")]
    InstanceTooLarge { n: usize, max: usize },

    #[error("probabilities do not sum to one: {0} + {1}")]
    NotNormalized(f64, f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("eigensolver did not converge in {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("non-finite loss at epoch {epoch}: {value}")]
    NonFiniteLoss { epoch: usize, value: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("nothing to write")]
    EmptyRows,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
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
