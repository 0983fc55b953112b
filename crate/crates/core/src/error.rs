use std::path::PathBuf;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate direction: cannot normalize a zero vector")]
    DegenerateDirection,

    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty point cloud")]
    EmptyCloud,

    #[error("empty file: {}", path.display())]
    EmptyFile { path: PathBuf },

    #[error("ragged row {row}: expected {expected} columns, found {found}")]
    RaggedRow { row: usize, expected: usize, found: usize },

    #[error("non-numeric cell at row {row}, column {col}: {cell:?}")]
    NonNumeric { row: usize, col: usize, cell: String },

    #[error("infinite quantile: p must lie strictly between 0 and 1, got {p}")]
    InfiniteQuantile { p: f64 },

    #[error("degenerate batch: direction {index} is linearly dependent on its predecessors")]
    DegenerateBatch { index: usize },

    #[error("empty direction batch")]
    EmptyBatch,

    #[error("exact depth budget exceeded: {work} candidate subsets > {limit}")]
    BudgetExceeded { work: f64, limit: f64 },

    #[error("solver stall after {pivots} pivots")]
    SolverStall { pivots: usize },

    #[error("halfspace system is infeasible")]
    Infeasible,

    #[error("level feasibility is not monotone: level {feasible}/{n} feasible but {infeasible}/{n} infeasible")]
    NonMonotoneLevels { feasible: usize, infeasible: usize, n: usize },

    #[error("unknown scenario: {0}")]
    UnknownScenario(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition failed for {name}: {reason}")]
    Precondition { name: String, reason: String },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by bad input or arguments, as opposed to numerical or
    /// internal failures.
    pub fn is_usage(&self) -> bool {
        !matches!(
            self,
            Error::SolverStall { .. }
                | Error::Infeasible
                | Error::NonMonotoneLevels { .. }
                | Error::DegenerateDirection
                | Error::DegenerateBatch { .. }
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
