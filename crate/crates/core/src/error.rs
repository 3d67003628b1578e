//! Error type shared across the library.

/// Errors raised by path construction, integration, solvers, and I/O.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A time grid with zero steps or a non-positive horizon.
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    /// An interval query with start >= end.
    #[error("empty interval: start index {start} is not below end index {end}")]
    EmptyInterval { start: usize, end: usize },

    /// Two objects that must share a grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Incompatible path / matrix dimensions.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A parameter outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An explicit scheme configuration that violates its stability bound.
    #[error("unstable configuration: {0}")]
    UnstableConfiguration(String),

    /// Non-finite values produced during a computation.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A Monte-Carlo request with too few samples to be meaningful.
    #[error("insufficient sample: {0}")]
    InsufficientSample(String),

    /// A regression with fewer points than coefficients.
    #[error("underdetermined regression: {0}")]
    Underdetermined(String),

    /// All-zero data where a normalising quantity is required.
    #[error("degenerate bound: {0}")]
    DegenerateBound(String),

    /// Malformed input file, with the offending line.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
