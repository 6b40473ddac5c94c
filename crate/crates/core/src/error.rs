use std::fmt;

use num_bigint::BigInt;

/// Position-annotated failure from the text encoding parser.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(position: usize, message: impl Into<String>) -> Self {
        Self {
            position,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at position {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("precision exhausted: {}", match certified_upto {
        Some(k) => format!("coefficients certified up to index {k}"),
        None => "no coefficient certified".to_string(),
    })]
    PrecisionExhausted { certified_upto: Option<usize> },

    #[error("coefficient stream ended at index {index}")]
    EndOfStream { index: usize },

    #[error("invalid coefficient a_{index} = {value}: partial quotients must be >= 1")]
    InvalidCoefficient { index: usize, value: BigInt },

    #[error("{0}")]
    RationalSource(&'static str),

    #[error("index {index} outside populated range (last populated index {populated:?})")]
    IndexOutOfRange {
        index: usize,
        populated: Option<usize>,
    },

    #[error("enclosure too wide for denominator q = {q}")]
    EnclosureTooWide { q: BigInt },

    #[error("not irrational: {0}")]
    NotIrrational(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
