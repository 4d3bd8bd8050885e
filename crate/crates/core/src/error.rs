use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid hex string {0:?}")]
    InvalidHex(String),

    #[error("hex value {hex:?} does not fit in {len} bits")]
    HexOverflow { hex: String, len: usize },

    #[error("rows have inconsistent widths")]
    RaggedRows,

    #[error("choice {index} is not in the symplectic dual of the previous choices")]
    ChoiceNotInDual { index: usize },

    #[error("choice {index} is already in the span of the previous choices")]
    ChoiceAlreadyInSpan { index: usize },

    #[error("expected {expected} generators, got {actual}")]
    WrongGeneratorCount { expected: usize, actual: usize },

    #[error("generators are not a symplectic self-dual basis: {0}")]
    NotSelfDual(String),

    #[error("number of qubits {n} is outside the supported range {min}..={max}")]
    QubitsOutOfRange { n: usize, min: usize, max: usize },

    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),

    #[error("K = {k} exceeds 4^N for N = {n}")]
    KOutOfRange { k: String, n: usize },

    #[error("point (s, t) = ({s}, {t}) lies outside the simplex")]
    OutOfSimplex { s: f64, t: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("malformed code file: {0}")]
    CodeFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
