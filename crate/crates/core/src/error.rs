use thiserror::Error;

/// Errors raised by graph construction, the exact counters, the estimators
/// and the bound formulas.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("graph must have at least one vertex")]
    EmptyGraph,

    #[error("{what} supports at most {limit} vertices, got {n}")]
    TooLarge {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("{what} requires at least {min} vertices, got {n}")]
    TooSmall {
        what: &'static str,
        n: usize,
        min: usize,
    },

    #[error("vertex {label} is out of range 1..={n}")]
    VertexOutOfRange { label: usize, n: usize },

    #[error("self-loop at vertex {label}")]
    SelfLoop { label: usize },

    #[error("invalid index pair ({i}, {j}) for a {n}x{n} matrix")]
    InvalidIndex { i: usize, j: usize, n: usize },

    #[error("degree {value} at position {index} exceeds the dimension {n}")]
    DegreeOutOfRange { index: usize, value: usize, n: usize },

    #[error("graph is not symmetric")]
    NotSymmetric,

    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("invalid row-order policy: {0}")]
    InvalidPolicy(String),

    #[error("row-order policy failed at step {step}: {reason}")]
    PolicyRuntime { step: usize, reason: String },

    #[error("unknown {what} `{name}`")]
    UnknownName { what: &'static str, name: String },

    #[error("trial count must be positive")]
    NoTrials,
}

pub type Result<T> = std::result::Result<T, Error>;
