use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid vertex weighting function: {0}")]
    InvalidVwf(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("infeasible point: vertex {vertex} violates its lower bound by {violation:e}")]
    Infeasible { vertex: usize, violation: f64 },

    #[error("unbounded problem: {0}")]
    Unbounded(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("time limit of {limit_ms} ms exceeded")]
    TimeLimit { limit_ms: u128 },

    #[error("stale handle: {0}")]
    StaleHandle(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Io(_) => 2,
            Error::Numerical(_) | Error::TimeLimit { .. } => 3,
            _ => 1,
        }
    }
}
