use thiserror::Error;

/// Errors raised by the simulator library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized: norm = {norm}")]
    NotNormalized { norm: f64 },

    #[error("register of {0} qubits exceeds the supported range 1..={max}", max = crate::MAX_QUBITS)]
    QubitCount(usize),

    #[error("invalid qubit set: {0}")]
    InvalidQubitSet(String),

    #[error("invalid cut: {0}")]
    InvalidCut(String),

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid test: {0}")]
    InvalidTest(String),

    #[error("test block {block:?} spans unlinked groups")]
    SpansUnlinkedGroups { block: Vec<usize> },

    #[error("time mismatch: expected outcome for n = {expected}, got n = {found}")]
    TimeMismatch { expected: u64, found: u64 },

    #[error("classicity undefined for a single-qubit register")]
    ClassicityUndefined,

    #[error("brute-force factorization limited to {max} qubits, got {found}", max = crate::factorize::BRUTE_FORCE_MAX_QUBITS)]
    TooManyQubitsForBruteForce { found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot unlink: {0}")]
    Unlink(String),

    #[error("causal graph error: {0}")]
    Graph(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("json: {0}")]
    Json(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
