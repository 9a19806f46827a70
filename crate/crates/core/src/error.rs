use std::io;

use thiserror::Error;

/// Errors produced by graph ingestion, the linear-algebra kernels, the
/// resistance oracle and the sampler.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: nonpositive weight {weight}")]
    NonPositiveWeight { line: usize, weight: f64 },

    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },

    #[error("vertex id {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("graph is disconnected")]
    Disconnected,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("epsilon {0} out of range")]
    EpsilonOutOfRange(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("n = {n} exceeds the dense oracle limit {limit}")]
    DenseLimitExceeded { n: usize, limit: usize },

    #[error("not a graph Laplacian: {0}")]
    NotLaplacian(String),

    #[error("grounded Laplacian is singular")]
    SingularGroundedSystem,

    #[error("solve for row {row} failed: relative residual {residual:e} after {iterations} iterations")]
    SolverFailed {
        row: usize,
        residual: f64,
        iterations: usize,
    },

    #[error("edge ({u}, {v}) is not an edge of the base graph")]
    EdgeNotInGraph { u: usize, v: usize },

    #[error("vertex sets differ: {left} vs {right}")]
    VertexSetMismatch { left: usize, right: usize },

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("oracle file: {0}")]
    OracleFormat(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
