use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unsupported field characteristic {0} (expected 2, 3 or 5)")]
    UnsupportedField(u32),

    #[error("ambient dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("ambient dimension {0} exceeds the supported maximum of 16")]
    AmbientTooLarge(usize),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("level {k} out of range for rank {n}")]
    LevelOutOfRange { n: usize, k: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("cannot parse {what}: {detail}")]
    Parse { what: &'static str, detail: String },

    #[error("structural inconsistency: {0}")]
    Structural(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
