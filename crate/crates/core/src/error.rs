use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix `{label}` is not unitary (max deviation {deviation:.3e})")]
    NonUnitary { label: String, deviation: f64 },
    #[error("qubit index {index} out of range for {total} qubits")]
    QubitOutOfRange { index: usize, total: usize },
    #[error("control qubits overlap the target qubits")]
    ControlTargetOverlap,
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("invalid register layout: {0}")]
    InvalidLayout(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("post-selection branch is numerically empty (probability {0:.3e})")]
    HeraldingFailed(f64),
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("state is the zero vector")]
    ZeroVector,
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("numeric overflow: {0}")]
    Overflow(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
