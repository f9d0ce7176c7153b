use std::fmt;

/// Errors surfaced by table construction, codec operations and parsers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Parameters violate a precondition (m < ell, unsupported ell, ...).
    InvalidParams(String),
    /// An index lies outside [0, N(m) - 1].
    IndexOutOfRange(String),
    /// Input data has the wrong shape (bit length, segment framing, alphabet).
    InvalidInput(String),
    /// A text artifact failed to parse; line numbers are 1-based.
    Parse { line: usize, msg: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            Error::IndexOutOfRange(msg) => write!(f, "index out of range: {msg}"),
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Parse { line, msg } => write!(f, "parse error at line {line}: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
