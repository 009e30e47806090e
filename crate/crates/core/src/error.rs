use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("degenerate graph: {0}")]
    DegenerateGraph(String),

    #[error("iteration count {requested} exceeds cap {cap}; use the stationary form instead")]
    IterationCap { requested: u64, cap: u64 },

    #[error("power iteration did not converge after {iterations} steps (residual {residual:e})")]
    NonConvergence { iterations: u64, residual: f64 },

    #[error("need at least {required} nodes, got {got}")]
    TooFewNodes { required: usize, got: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("budget mismatch: {left} vs {right}")]
    BudgetMismatch { left: f64, right: f64 },

    #[error("invalid allocation: {0}")]
    InvalidAllocation(String),

    #[error("invalid value profile: {0}")]
    InvalidProfile(String),

    #[error("profile is degenerate for this construction ({0}); classify it first")]
    DegenerateProfile(String),

    #[error("tangent-length system needs an odd number of sides, got {0}")]
    EvenSideCount(usize),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("too few samples: need at least {required}, got {got}")]
    TooFewSamples { required: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
