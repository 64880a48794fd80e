use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A caller broke an operation's precondition (e.g. a busy server was
    /// asked to pick a queue).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Invalid system or experiment configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// A distribution or policy parameter outside its documented range.
    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("slot {slot} is outside the horizon [0, {horizon})")]
    Range { slot: u64, horizon: u64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("scripted source exhausted after {0} values")]
    Exhausted(usize),

    #[error("infeasible: {0}")]
    Infeasible(String),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
