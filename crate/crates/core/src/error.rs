use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("singular tridiagonal pivot {pivot:e} at row {row}")]
    SingularPivot { row: usize, pivot: f64 },

    #[error("singular dense system (pivot {pivot:e} at column {column})")]
    SingularMatrix { column: usize, pivot: f64 },

    #[error("singular Sylvester operator: back-substitution pivot {pivot:e}")]
    SingularSylvester { pivot: f64 },

    #[error("{routine} did not converge within {iterations} iterations")]
    NoConvergence { routine: &'static str, iterations: usize },

    #[error("GMRES stopped after {iterations} iterations at relative residual {residual:e}")]
    GmresMaxIter {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("adaptive step did not converge after {iterations} basis augmentations (relative residual {residual:e})")]
    StepNotConverged { iterations: usize, residual: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot rescale a solution with zero mass")]
    ZeroMass,

    #[error("dense problem of size {size} exceeds the limit of {limit}")]
    TooLarge { size: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
