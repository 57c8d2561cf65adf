use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Vector or matrix dimensions disagree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An operation that needs data received an empty collection.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// An argument is outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Training data contains a single class where two are required.
    #[error("training data contains a single class")]
    SingleClass,

    /// Non-finite value where finite data is required.
    #[error("non-finite data: {0}")]
    NonFiniteData(String),

    /// A numerical routine failed beyond recovery (e.g. factorisation).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A problem key or configuration is not recognised.
    #[error("unknown problem: {0}")]
    UnknownProblem(String),

    /// A configuration is outside the tabulated grid.
    #[error("untabulated configuration: {0}")]
    UntabulatedConfig(String),

    /// Filesystem failure while reading or writing records.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Record or model (de)serialisation failure.
    #[error("serialisation error: {0}")]
    Serialisation(#[from] serde_json::Error),

    /// Configuration file parse failure.
    #[error("config parse error: {0}")]
    ConfigParse(String),

    /// A failure that occurred at a specific optimisation iteration.
    #[error("iteration {iteration}: {source}")]
    AtIteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
