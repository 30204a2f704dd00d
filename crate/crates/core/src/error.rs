//! Error types shared by all modules.

use alloc::string::String;
use core::fmt;

/// Errors from state construction, channel application and protocol
/// composition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimError {
    /// An input failed a precondition (parameter out of range, bad qubit
    /// indices, non-normalized amplitudes, ...).
    Validation(String),
    /// A register would exceed the supported qubit count.
    Capacity { requested: usize, max: usize },
    /// Operand dimensions do not match.
    DimensionMismatch { expected: usize, actual: usize },
    /// Both measurement branches carry no weight; the state cannot be
    /// conditioned on either outcome.
    DegenerateState,
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::Validation(msg) => write!(f, "validation error: {msg}"),
            SimError::Capacity { requested, max } => {
                write!(f, "register of {requested} qubits exceeds the {max}-qubit cap")
            }
            SimError::DimensionMismatch { expected, actual } => {
                write!(f, "dimension mismatch: expected {expected}, got {actual}")
            }
            SimError::DegenerateState => write!(f, "degenerate state: no measurable branch"),
        }
    }
}

impl core::error::Error for SimError {}

pub type Result<T> = core::result::Result<T, SimError>;

pub(crate) fn validation(msg: impl fmt::Display) -> SimError {
    SimError::Validation(alloc::format!("{msg}"))
}
