use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation failed at index {index}: {message}")]
    Validation { index: usize, message: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("sequence too short: need at least {needed} points, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("fingertip gap of {len} frames starting at frame {start}")]
    Gap { start: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("numerical underflow in sequence {sequence}")]
    Underflow { sequence: usize },

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("class `{label}` has {count} samples, fewer than {k} folds")]
    ClassTooSmall { label: String, count: usize, k: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unsupported format version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },

    #[error("corrupt stream: {0}")]
    Corrupt(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
