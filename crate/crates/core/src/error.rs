use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Pauli length mismatch: {left} vs {right} qubits")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid Pauli string: {0}")]
    InvalidPauli(String),

    #[error("qubit {qubit} out of range for a {n}-qubit register")]
    QubitOutOfRange { qubit: usize, n: usize },

    #[error("two-qubit operation {0} acts twice on the same qubit")]
    RepeatedQubit(String),

    #[error("operation {0} is not unitary")]
    NotUnitary(String),

    #[error("circuit is not Clifford: operation {index} is {op}")]
    NotClifford { index: usize, op: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("requested {requested} independent checks from a group of rank {rank}")]
    TooManyChecks { requested: usize, rank: usize },

    #[error("CZ-only circuit expected, found {0}")]
    NotCzOnly(String),

    #[error("operation index {index} out of range for a circuit of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("{0}")]
    Io(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
