use thiserror::Error;

/// Errors raised by graph construction, sampling, inference and the oracles.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid dimensions must be positive, got {rows}x{cols}")]
    EmptyGrid { rows: usize, cols: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("vertex {vertex} is out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("graph is not connected")]
    Disconnected,

    #[error("graph is not regular")]
    NotRegular,

    #[error("vertex set is empty")]
    EmptySet,

    #[error("vertex set does not induce a connected subgraph")]
    DisconnectedSet,

    #[error("filled-in set is not defined for a region touching all four sides")]
    TypeSix,

    #[error("no 3-sided component in the complement of the region")]
    NoThreeSidedComponent,

    #[error("{what} exceeds capacity: {got} > {limit}")]
    Capacity {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    #[error("length mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid probability {name} = {value}")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error(
        "noise level {name} = {value} makes the log-odds weight degenerate; \
         use a hard-constraint or edge-only formulation"
    )]
    DegenerateNoise { name: &'static str, value: f64 },

    #[error("invalid label {0}, expected +1 or -1")]
    InvalidLabel(i64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. })
    }
}
