use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid platoon spec (n = {n}, k = {k}): {reason}")]
    InvalidSpec {
        n: usize,
        k: usize,
        reason: &'static str,
    },

    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),

    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("exhaustive {measure} search refused: n = {n} exceeds limit {limit}")]
    ExhaustiveRefused {
        measure: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("model mismatch: no fault set of size <= {max_faults} explains the measurements")]
    ModelMismatch { max_faults: usize },

    #[error("integration step {step} is unstable for pole magnitude {pole_magnitude}")]
    UnstableStep { step: f64, pole_magnitude: f64 },
}
