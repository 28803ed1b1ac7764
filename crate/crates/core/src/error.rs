use alloc::string::String;

/// Errors produced anywhere in the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("gate {index} is a SWAP/CCX/CSWAP; decompose it before computing CX metrics")]
    MultiQubitPrimitivePresent { index: usize },
    #[error("gate {index} acts on qubit {qubit}, circuit has {num_qubits} qubits")]
    QubitOutOfRange { index: usize, qubit: usize, num_qubits: usize },
    #[error("gate {index} repeats a qubit")]
    RepeatedQubit { index: usize },
    #[error("not a permutation of 0..{0}")]
    InvalidPermutation(usize),
    #[error("{n} qubits exceeds the dense simulation cap of {cap}")]
    TooManyQubits { n: usize, cap: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("qubit count mismatch: {0} vs {1}")]
    QubitCountMismatch(usize, usize),
    #[error("gate {index} is not a CX; the circuit is not linear over F2")]
    NonLinearGate { index: usize },
    #[error("no Hadamard pair found on qubit {0}")]
    TargetNotFound(usize),
    #[error("controlled version of this gate is not supported")]
    UnsupportedControlledW,
    #[error("invalid placement: {0}")]
    InvalidPlacement(String),
    #[error("moving qubit {0} is not compatible with the requested role")]
    RoleUnsupported(usize),
    #[error("Pauli string is the identity; exp(-i theta I) is a global phase")]
    IdentityString,
    #[error("invalid coupling: {0}")]
    InvalidCoupling(String),
    #[error("target is not reachable with the given coupling")]
    Unreachable,
    #[error("no bias vector for CX({0},{1})")]
    MissingPair(usize, usize),
    #[error("bias ratio {0} outside [-1, 1] or not finite")]
    InvalidBias(f64),
    #[error("confusion matrix of qubit {0} is singular")]
    SingularConfusion(usize),
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("solver did not converge after {iterations} iterations (gap {gap:e})")]
    SolverDidNotConverge { iterations: usize, gap: f64 },
    #[error("family is empty")]
    EmptyFamily,
    #[error("slot {0} does not match the family gate")]
    IncompatibleSlot(usize),
    #[error("post-selection rejected every shot in trial {0}")]
    AllShotsRejected(usize),
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unsupported gate `{name}`")]
    UnsupportedGate { name: String, line: usize, col: usize },
    #[error("{line}:{col}: undeclared register `{name}`")]
    UndeclaredRegister { name: String, line: usize, col: usize },
    #[error("{line}:{col}: index {index} out of range for register of size {size}")]
    IndexOutOfRange { index: usize, size: usize, line: usize, col: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;
