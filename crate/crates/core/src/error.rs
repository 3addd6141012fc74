use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid framework: {0}")]
    Framework(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("rank {rank} out of range for a scenario space of {size}")]
    RankOutOfRange { rank: u64, size: u64 },

    #[error("invalid cross-impact matrix: {0}")]
    InvalidCim(String),

    /// The scenario space (or combinatorial product) is larger than the
    /// configured enumeration cap.
    #[error(
        "enumeration refused: {size} exceeds the enumeration cap of {cap} (raise it with --cap)"
    )]
    CapExceeded { size: u64, cap: u64 },

    #[error("invalid subsystem: {0}")]
    Subsystem(String),

    #[error("cannot aggregate: descriptor {} has conflicting states {states:?}", .descriptor + 1)]
    AggregationConflict {
        descriptor: usize,
        states: Vec<usize>,
    },

    #[error("chain failure in timespan '{timespan}': {reason}")]
    Chain { timespan: String, reason: String },

    #[error("missing manual value for descriptor '{descriptor}', state '{state}'")]
    MissingManualValue { descriptor: String, state: String },

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },

    #[error(
        "dimension mismatch at {path}: expected {expected_rows}x{expected_cols}, found {found}"
    )]
    Dimension {
        path: String,
        expected_rows: usize,
        expected_cols: usize,
        found: String,
    },

    #[error("unknown name at {path}: {name}")]
    UnknownName { path: String, name: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("worker pool: {0}")]
    Pool(String),
}
