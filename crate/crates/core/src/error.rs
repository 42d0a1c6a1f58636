use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {what} (expected {expected}, got {got})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid symmetric matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid family parameters: {0}")]
    InvalidFamily(String),

    #[error("matrix B is not positive definite")]
    NotPositiveDefinite,

    #[error("no feasible point available: {0}")]
    NoFeasiblePoint(String),

    #[error("factor is infeasible: constraint residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    Infeasible { residual: f64, tolerance: f64 },

    #[error("direction is not tangent: normal component {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    NotTangent { residual: f64, tolerance: f64 },

    #[error("retraction failed after {iterations} Newton iterations (residual {residual:.3e}); shrink the step")]
    RetractionFailed { iterations: usize, residual: f64 },

    #[error("constraint count {0} exceeds the dense Gram limit of 20000 for unstructured problems")]
    TooManyConstraints(usize),

    #[error("constraint matrices are linearly dependent: {combination}")]
    DependentConstraints { combination: String },

    #[error("factor has rank {rank} below its column count {p} and trimming was disabled")]
    RankDeficient { rank: usize, p: usize },

    #[error("extraction failed: {0}")]
    Extraction(String),

    #[error("invalid options: {0}")]
    InvalidOptions(String),

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
