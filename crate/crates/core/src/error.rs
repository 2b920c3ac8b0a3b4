use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A construction or query parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("index {index} out of range (valid: {min}..={max})")]
    Bounds { index: usize, min: usize, max: usize },
    #[error("symbol {0} is not in the alphabet")]
    UnknownSymbol(u32),
    /// The input text cannot be processed as given.
    #[error("invalid input: {0}")]
    Input(String),
    /// A serialized index is malformed.
    #[error("malformed index: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}

pub(crate) fn check_range(index: usize, min: usize, max: usize) -> Result<()> {
    if index < min || index > max {
        Err(Error::Bounds { index, min, max })
    } else {
        Ok(())
    }
}
