use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("qubit {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },

    #[error("two-qubit gate needs distinct operands, got {0} twice")]
    DuplicateOperand(usize),

    #[error("gate {gate} expects {expected} operand(s), got {got}")]
    OperandCount { gate: &'static str, expected: usize, got: usize },

    #[error("gate {0} requires an angle")]
    MissingAngle(&'static str),

    #[error("gate {0} takes no angle")]
    SuperfluousAngle(&'static str),

    #[error("parameter vector has length {got}, circuit needs {expected}")]
    ParameterCount { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not a valid density operator: {0}")]
    NotDensity(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("parameter {0} is not attached to a rotation gate; the two-term shift rule does not apply")]
    ShiftRuleInvalid(usize),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config key `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
