use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid box bounds: {0}")]
    InvalidBounds(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("empty polytope")]
    EmptyPolytope,

    #[error("unknown problem `{name}`; valid names: {valid}")]
    UnknownProblem { name: String, valid: String },

    #[error("problem `{0}` is defined externally and has no built-in formula")]
    ExternallyDefined(String),

    #[error("problem `{name}` does not support n = {n}; supported: {supported}")]
    UnsupportedDimension {
        name: String,
        n: usize,
        supported: String,
    },

    #[error("unknown preset `{name}`; valid presets: simple, full, full_150, full_200")]
    UnknownPreset { name: String },

    #[error("unknown solver `{name}`; valid solvers: tesgo, dca_local")]
    UnknownSolver { name: String },

    #[error("unknown measure `{name}`; valid measures: accuracy, time, nfev")]
    UnknownMeasure { name: String },

    #[error("missing (solver, problem) records: {0}")]
    MissingRecords(String),

    #[error("results schema mismatch: {0}")]
    Schema(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
