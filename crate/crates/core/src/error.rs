use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cycle needs at least 3 vertices, got {0}")]
    CycleTooSmall(usize),
    #[error("tree degree must be at least 3, got {0}")]
    TreeDegreeTooSmall(usize),
    #[error("order is not a bijection on {vertex_count} vertices: {reason}")]
    InvalidOrder { vertex_count: usize, reason: String },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("ball size {j} out of range 0..={vertex_count}")]
    BallOutOfRange { j: usize, vertex_count: usize },
    #[error("length mismatch: expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("pairing is not an involution at vertex {0}")]
    NotAnInvolution(usize),
    #[error("reflection is not compatible with the order at pair ({0}, {1})")]
    IncompatibleReflection(usize, usize),
    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error("kernels have different times {0} and {1}")]
    TimeMismatch(f64, f64),
    #[error("vertex set must be nonempty")]
    EmptySet,
    #[error("function must be nonnegative (vertex {vertex} has {value})")]
    NegativeValue { vertex: usize, value: f64 },
    #[error("search space too large: {0}")]
    TooLarge(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("problem is not solvable: {0}")]
    Unsolvable(String),
    #[error("iteration did not converge after {iterations} iterations (last change {last_change:e})")]
    NoConvergence { iterations: usize, last_change: f64 },
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
