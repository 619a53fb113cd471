use thiserror::Error;

/// Errors raised by the chain model, compiler, propagators and experiments.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("basis index {index} out of range for {n} qubits")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("qubit {k} out of range for {n} qubits")]
    QubitOutOfRange { k: usize, n: usize },

    #[error("invalid chain parameters: {0}")]
    InvalidParameters(String),

    #[error("addressability violation: {0}")]
    AddressabilityViolation(String),

    #[error("offsets (mu={mu}, nu={nu}) are not realizable on qubit {k}")]
    UnrealizableOffsets { k: usize, mu: i32, nu: i32 },

    #[error("invalid pulse: {0}")]
    InvalidPulse(String),

    #[error("qubit {0} is not a data qubit (expected 0, 2 or 3)")]
    NotDataQubit(usize),

    #[error("target {0} has no single-pulse oracle (supported: 0, 5, 8, 13)")]
    InvalidTarget(u32),

    #[error("state dimension {got} does not match 2^{n} = {expected}")]
    DimensionMismatch { got: usize, expected: usize, n: usize },

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("RK4 step count {steps} below the {required} steps needed for 20 samples per fastest period")]
    StepTooCoarse { steps: usize, required: usize },

    #[error("fit window is degenerate: {0}")]
    DegenerateWindow(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("program format error at line {line}: {msg}")]
    Format { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
