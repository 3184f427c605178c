use thiserror::Error;

/// Errors raised by the simulation and evolution routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("invalid target qubits {targets:?} for a {n_qubits}-qubit register")]
    InvalidTargets {
        targets: Vec<usize>,
        n_qubits: usize,
    },

    #[error("{n_qubits} qubits exceeds the dense limit of {limit}")]
    TooLarge { n_qubits: usize, limit: usize },

    #[error("expected {expected} values, found {found}")]
    WrongArity { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("support must not be empty")]
    EmptySupport,

    #[error("support {0:?} is not a single qubit or a nearest-neighbour pair")]
    NonAdjacentSupport(Vec<usize>),

    #[error("invalid ansatz: {0}")]
    InvalidAnsatz(String),

    #[error("term on qubits {0:?} is neither one-local nor nearest-neighbour two-local")]
    NonLocalTerm(Vec<usize>),

    #[error("total time {t} is not an integer multiple of the step {tau}")]
    NonIntegerSteps { t: f64, tau: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("circuits differ in structure: {0}")]
    CircuitMismatch(String),

    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
