//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by model construction, validation, placement, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A coordinate lies outside the matrix dimensions (coordinates are
    /// 1-based, so row 0 or column 0 is always out of range).
    #[error("{matrix}: entry ({row}, {col}) out of range for a {rows}x{cols} matrix")]
    CoordinateOutOfRange {
        matrix: String,
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    /// A mode's matrix has dimensions inconsistent with the declared (n, p).
    #[error("mode {mode}: {detail}")]
    DimensionMismatch { mode: usize, detail: String },

    /// Disturbance column `j` is zero in every mode, i.e. input d_j never
    /// enters the dynamics. Rejected unless explicitly allowed.
    #[error("disturbance input d{0} has a zero column in F for every mode")]
    ZeroDisturbanceColumn(usize),

    /// The system does not satisfy basic well-formedness (n >= 1, m >= 1).
    #[error("invalid system: {0}")]
    InvalidSystem(String),

    /// A class-specific algorithm was requested for a system outside that
    /// class.
    #[error("algorithm '{algorithm}' not applicable: {reason}")]
    WrongClass {
        algorithm: &'static str,
        reason: String,
    },

    /// A computed placement failed the observability re-check. This
    /// indicates a bug in the placement algorithms and should never occur.
    #[error("internal verification failure: {0}")]
    InternalVerificationFailure(String),

    /// The exhaustive search was invoked on a system larger than the cap.
    #[error("exhaustive search refused: n + p = {size} exceeds cap {cap}")]
    CapExceeded { size: usize, cap: usize },

    /// A placement is inconsistent with the system it is checked against.
    #[error("invalid placement: {0}")]
    InvalidPlacement(String),

    /// A document parsed as JSON but violates the format's semantic rules.
    #[error("invalid document: {0}")]
    InvalidDocument(String),

    /// JSON syntax error.
    #[error("JSON parse error: {0}")]
    Json(#[from] serde_json::Error),

    /// Underlying I/O failure (CLI file handling).
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
