//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree bound {given} is below the maximum degree {required}")]
    DegreeBound { required: usize, given: usize },
    #[error("node {node} out of range for a graph on {n} nodes")]
    NodeRange { node: usize, n: usize },
    #[error("operation requires a nonempty node set")]
    EmptySet,
    #[error("operation requires a proper subset of the nodes")]
    FullSet,
    #[error("node {node} is not a member of the set")]
    NotInSet { node: usize },
    #[error("set has no boundary edges, so the horizon is undefined")]
    NoBoundary,
    #[error("vector length {got} does not match node count {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("operation requires a regular graph (uniform degree)")]
    NotRegular,
    #[error("exhaustive enumeration is limited to {limit} nodes, got {n}")]
    TooLarge { n: usize, limit: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("infeasible graph spec: {0}")]
    InfeasibleSpec(String),
    #[error("graph generation failed: {0}")]
    GenerationFailed(String),
    #[error("malformed graph file: {0}")]
    MalformedFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
