use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("not a permutation: {0}")]
    NotAPermutation(String),
    #[error("index {index} out of range 1..={n}")]
    OutOfRange { index: usize, n: usize },
    #[error("invalid range [{lo}, {hi}]")]
    InvalidRange { lo: usize, hi: usize },
    #[error("select out of range: {0}")]
    SelectOutOfRange(usize),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("invalid sizes: {0}")]
    InvalidSizes(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("bad index file: {0}")]
    Format(String),
    #[error("decomposition failed: {0}")]
    Decomposition(String),
    #[error("index has no rectangle component")]
    NoGeo,
}

pub type Result<T> = std::result::Result<T, Error>;
