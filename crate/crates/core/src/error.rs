//! Error type shared by every module in the crate.

use thiserror::Error;

/// Errors produced by state construction, gate application, and protocol steps.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit count {n} outside supported range 1..={max}")]
    QubitCountOutOfRange { n: usize, max: usize },

    #[error("qubit index {index} out of range for {n} qubits")]
    QubitIndexOutOfRange { index: usize, n: usize },

    #[error("operation requires distinct qubits, got index {0} twice")]
    DuplicateQubit(usize),

    #[error("state dimensions differ: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },

    #[error("angle must be finite")]
    NonFiniteAngle,

    #[error("amplitude array length {0} is not a power of two")]
    BadAmplitudeCount(usize),

    #[error("partial trace keeps {0} qubits; only 1 or 2 are supported")]
    UnsupportedKeepCount(usize),

    #[error("at least {min} measurement shots required, got {got}")]
    TooFewShots { got: u64, min: u64 },

    #[error("shot count must be even, got {0}")]
    OddShots(u64),

    #[error("collective operation requires at least 2 qubits, got {0}")]
    TooFewQubits(usize),

    #[error("sign string has {got} entries, expected {expected}")]
    SignLengthMismatch { got: usize, expected: usize },

    #[error("invalid sign character {0:?}; expected '+' or '-'")]
    InvalidSign(char),

    #[error("full expansion limited to {max} qubits, got {n}; use the top-k enumeration")]
    ExpansionTooLarge { n: usize, max: usize },

    #[error("grid must be at least 2x2, got {theta}x{phi}")]
    GridTooSmall { theta: usize, phi: usize },

    #[error("top-k query requires k >= 1")]
    EmptyTopK,

    #[error("reduced state does not have the two-fold 1/2-degenerate rank-2 structure of an encoded state")]
    NotAnEncodedState,
}

pub type Result<T> = std::result::Result<T, Error>;
