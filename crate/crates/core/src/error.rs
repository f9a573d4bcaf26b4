use thiserror::Error;

/// Errors shared across the toolkit.
///
/// `Input` covers malformed files and references; `Math` is a validated
/// mathematical failure that still carries a witness; `SearchLimit` is the
/// enumeration cap.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Math(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("search limit exceeded in {what} (limit {limit})")]
    SearchLimit { what: &'static str, limit: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn is_input(&self) -> bool {
        matches!(self, Error::Input(_) | Error::Parse { .. })
    }
}
