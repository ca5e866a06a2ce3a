use alloc::string::String;
use core::fmt;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violated a precondition (index out of range, m = 0, ...).
    InvalidArgument(String),
    /// A multi-index entry left the admissible range `1..=n`.
    InvalidIndex { entry: usize, n: usize },
    /// A configured resource cap (ambient dimension, support enumeration)
    /// would be exceeded.
    ResourceLimit(String),
    /// A dense solve failed numerically (singular or badly conditioned).
    Numerical(String),
    /// Division by a zero reference norm.
    ZeroReference,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::InvalidIndex { entry, n } => {
                write!(f, "multi-index entry {entry} outside 1..={n}")
            }
            Error::ResourceLimit(msg) => write!(f, "resource limit: {msg}"),
            Error::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            Error::ZeroReference => write!(f, "reference vector has zero norm"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
