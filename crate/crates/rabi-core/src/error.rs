use thiserror::Error;

/// Errors reported by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an operation's inputs was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// The iterative eigensolver exceeded its iteration cap. Never a silent
    /// wrong answer: callers must treat the decomposition as unavailable.
    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
