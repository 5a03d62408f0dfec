use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    /// The minimax solver hit its iteration cap; the optimum lies in `[lower, upper]`.
    #[error("solver did not converge after {iterations} iterations (value in [{lower}, {upper}])")]
    Solver { lower: f64, upper: f64, iterations: usize },

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("complex integrity violation: {0}")]
    Integrity(String),

    #[error("subset violation: {0}")]
    Subset(String),

    #[error("measure error: {0}")]
    Measure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
