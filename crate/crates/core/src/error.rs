use thiserror::Error;

/// Errors produced anywhere in the cover pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point in collision: {0}")]
    InCollision(String),

    #[error("set is empty: {0}")]
    Empty(String),

    #[error("set is unbounded: {0}")]
    Unbounded(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The rejection sampler could not find an uncovered free sample within
    /// its budget; the uncovered volume is negligible.
    #[error("coverage saturated after {rejections} consecutive rejections")]
    CoverageSaturated { rejections: u64 },

    #[error("time budget of {seconds} s exceeded")]
    Timeout { seconds: f64 },

    /// Enumeration of admissible cliques ran out of budget. `best` holds the
    /// largest admissible clique seen so far, if any.
    #[error("clique enumeration budget of {budget} exhausted")]
    EnumerationBudget { budget: usize, best: Option<Vec<usize>> },

    #[error("hyperplane budget of {0} exceeded")]
    HyperplaneBudget(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
