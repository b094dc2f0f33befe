use thiserror::Error;

/// Errors surfaced by the engine, the baselines, and the benchmark harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A cell could not be parsed as a real number. Row and column are
    /// 1-based, counted over the raw file (header row included).
    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("input is empty")]
    EmptyInput,

    #[error("input too short: need at least {needed} observations, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("window of {window} exceeds series length {len}")]
    WindowTooLarge { window: usize, len: usize },

    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("segment index {index} out of range (have {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("no candidate segment has an in-range future window")]
    NoValidCandidates,

    #[error("no cross-validation split produced a forecast")]
    EmptyResult,

    #[error("unknown synthetic function: {0}")]
    UnknownFunction(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
