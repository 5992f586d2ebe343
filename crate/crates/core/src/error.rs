use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// One absent (algorithm, dataset, metric, seed) combination in a result grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissingCell {
    pub algorithm: String,
    pub dataset: String,
    pub metric: String,
    pub seed: i64,
}

impl fmt::Display for MissingCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "algorithm={} dataset={} metric={} seed={}",
            self.algorithm, self.dataset, self.metric, self.seed
        )
    }
}

fn join_missing(missing: &[MissingCell]) -> String {
    missing.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("row {row}: {message}")]
    MalformedRow { row: usize, message: String },

    #[error("row {row}: duplicate record for algorithm={algorithm} dataset={dataset} metric={metric} seed={seed}")]
    DuplicateRecord {
        row: usize,
        algorithm: String,
        dataset: String,
        metric: String,
        seed: i64,
    },

    #[error("row {row}: unknown metric `{metric}`")]
    UnknownMetric { row: usize, metric: String },

    #[error("incomplete grid, {} missing cell(s): {}", .missing.len(), join_missing(.missing))]
    IncompleteGrid { missing: Vec<MissingCell> },

    #[error("registry line {line}: {message}")]
    Registry { line: usize, message: String },

    #[error("need at least two algorithms, found {0}")]
    TooFewAlgorithms(usize),

    #[error("need at least one seed")]
    NoSeeds,

    #[error("empty test suite")]
    EmptySuite,

    #[error("non-finite value {value} at position {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("tie epsilon must be a nonnegative finite number, got {0}")]
    InvalidEpsilon(f64),

    #[error("unresolved failure: algorithm={algorithm} dataset={dataset} metric={metric} seed={seed} has no value")]
    UnresolvedFailure {
        algorithm: String,
        dataset: String,
        metric: String,
        seed: i64,
    },

    #[error("test {dataset}/{metric}, seed {seed}: {source}")]
    RankContext {
        dataset: String,
        metric: String,
        seed: i64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid rank row: {0}")]
    InvalidRankRow(String),

    #[error("tie-corrected concordance requires mean-of-tied ranks")]
    RequiresMeanRanks,

    #[error("rank distributions differ in sample count: {left} vs {right}")]
    SampleCountMismatch { left: usize, right: usize },

    #[error("frameworks cannot be compared: {0}")]
    FrameworkMismatch(String),

    #[error("subsample size {size} outside 1..={max}")]
    SizeOutOfRange { size: usize, max: usize },

    #[error("repeats must be at least 1")]
    NoRepeats,

    #[error("no coefficients requested")]
    NoCoefficients,

    #[error("invalid synthetic config: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status for this error: 1 for I/O and runtime failures,
    /// 2 for anything wrong with the input data or arguments.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) | Error::File { .. } => 1,
            Error::Csv(e) if e.is_io_error() => 1,
            Error::Json(e) if e.is_io() => 1,
            Error::RankContext { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}
