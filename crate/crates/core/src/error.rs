use thiserror::Error;

/// Errors produced anywhere in the simulator and experiment harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    /// Inconsistent sizes, bad site indices, or constraint violations in user input.
    #[error("configuration error: {0}")]
    Config(String),

    /// A matrix that should be unitary (or a state that should be normalized) is not.
    #[error("numerical validation error: {0}")]
    Numerical(String),

    /// Interpolation parameter or Trotter schedule out of range.
    #[error("schedule error: {0}")]
    Schedule(String),

    /// Dimension of two states or operators do not agree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// Refused to allocate a dense object larger than the memory guard.
    #[error("resource limit: {0}")]
    Resource(String),

    /// A gate kind that the requested transformation does not accept.
    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),

    /// Shot-based estimator invoked on an empty shot set.
    #[error("empty shot set: {0}")]
    EmptyShots(String),

    /// Malformed text input (circuits, configs, shot dumps).
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for SimError {
    fn from(e: std::io::Error) -> Self {
        SimError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, SimError>;

impl SimError {
    /// Process exit status for the command-line driver: 2 for numerical
    /// failures, 1 for everything the user can fix in the input.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Numerical(_) | SimError::EmptyShots(_) | SimError::Resource(_) => 2,
            _ => 1,
        }
    }
}
