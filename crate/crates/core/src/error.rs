use thiserror::Error;

/// Errors produced by the simulator and the algorithms built on top of it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QfinError {
    #[error("qubit count {requested} outside supported range 1..={max}")]
    Capacity { requested: usize, max: usize },

    #[error("qubit index {index} out of range for {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("qubit {0} used more than once in one instruction")]
    DuplicateQubit(usize),

    #[error("gate of dimension {gate_dim} cannot act on {num_targets} target qubit(s)")]
    DimensionMismatch { gate_dim: usize, num_targets: usize },

    #[error("gate `{0}` is not unitary")]
    NotUnitary(String),

    #[error("unknown gate `{0}`")]
    UnknownGate(String),

    #[error("gate `{name}` expects {expected} parameter(s), got {got}")]
    ParameterCount { name: String, expected: usize, got: usize },

    #[error("state norm drifted to {norm}")]
    NormDrift { norm: f64 },

    #[error("post-selection branch has probability {probability:e}")]
    PostSelection { probability: f64 },

    #[error("shot count must be positive")]
    ZeroShots,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("matrix is not Hermitian")]
    NotHermitian,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, QfinError>;

impl QfinError {
    /// True for failures caused by the numbers rather than by malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, QfinError::NormDrift { .. } | QfinError::PostSelection { .. } | QfinError::Singular)
    }
}
