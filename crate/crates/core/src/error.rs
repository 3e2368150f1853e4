use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("non-finite coordinate at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("point set must have at least one point and one dimension (got n={n}, d={d})")]
    EmptyPointSet { n: usize, d: usize },

    #[error("k must be at least 1")]
    ZeroK,

    #[error("k = {k} exceeds the {available} available points")]
    KTooLarge { k: usize, available: usize },

    #[error("line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error("invalid Mahalanobis matrix: {0}")]
    InvalidMatrix(String),

    #[error(
        "pairwise distance matrix needs {entries} entries, over the budget of {budget}; \
         use chunked brute-force search (bf_knn) instead"
    )]
    MemoryBudget { entries: u128, budget: u128 },

    #[error("unsupported metric: {0}")]
    UnsupportedMetric(String),

    #[error("zero k-th neighbor distance at indices {indices:?} (duplicate points)")]
    DuplicatePoints { indices: Vec<usize> },

    #[error("neighbor tables differ between {left} and {right} at n={n}, d={d}")]
    CrossCheck {
        left: String,
        right: String,
        n: usize,
        d: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for malformed input files, as opposed to contract violations.
    pub fn is_input_format(&self) -> bool {
        matches!(self, Error::Csv { .. })
    }
}
