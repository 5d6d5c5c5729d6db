use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("slice {0} is empty")]
    EmptySlice(usize),

    #[error("unknown method `{0}`")]
    UnknownMethod(String),

    #[error("malformed model file: {0}")]
    Format(String),

    #[error("model format version {found} is not supported (this build reads version {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures caused by the numbers rather than by the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_) | Error::DegenerateData(_))
    }
}
