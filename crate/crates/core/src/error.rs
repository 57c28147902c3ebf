use thiserror::Error;

/// Errors produced by validation, construction and solving.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must be square with dim >= 1 (got {rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("expected {expected} entries for a {dim}x{dim} matrix, got {found}")]
    EntryCount { dim: usize, expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("trace is {trace}, expected 1")]
    Trace { trace: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.6e})")]
    NotPositive { eigenvalue: f64 },

    #[error("state vector has squared norm {norm_sqr}, expected 1")]
    NotNormalized { norm_sqr: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid party subset {parties:?} for {count} parties")]
    InvalidParties { parties: Vec<usize>, count: usize },

    #[error("state has rank {found}, expected {expected}")]
    Rank { expected: &'static str, found: usize },

    #[error("observable has diagonal element of magnitude {value:.3e} in the eigenbasis of the state")]
    NonZeroDiagonal { value: f64 },

    #[error("mean '{mean}' has m(1,0) = 0, normalization is undefined")]
    DegenerateNormalization { mean: String },

    #[error("unknown mean '{name}' (available: {available})")]
    UnknownMean { name: String, available: String },

    #[error("decomposition needs at least {rank} terms, got {count}")]
    TooFewTerms { rank: usize, count: usize },

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("symmetric extension needs N >= 3, got {0}")]
    ExtensionSize(usize),

    #[error("problem too large: d^N = {size} exceeds {limit}")]
    SizeGuard { size: usize, limit: usize },

    #[error("malformed conic problem: {0}")]
    MalformedProblem(String),

    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),

    #[error("solver breakdown: {0}")]
    Solver(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
