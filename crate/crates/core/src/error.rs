use thiserror::Error;

/// Errors raised while validating inputs or building search structures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("pattern set is empty")]
    EmptyPatternSet,

    #[error("pattern {index} is empty")]
    EmptyPattern { index: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("configuration infeasible: {0}")]
    Config(String),

    #[error("length error: {0}")]
    Length(String),

    #[error("gram position {position} out of range (text holds {len} grams)")]
    OutOfBounds { position: usize, len: usize },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
