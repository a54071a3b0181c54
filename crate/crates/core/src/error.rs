use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// A root-of-unity sum did not land on an integer within tolerance.
    #[error("formula inconsistency for c_{q}({a}): {detail}")]
    FormulaInconsistency { q: u64, a: u64, detail: String },

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalog(String),

    #[error("invalid parameters for `{name}`: {reason}")]
    InvalidParams { name: String, reason: String },

    #[error("`{0}` has no exact-rational values")]
    NotExact(String),

    #[error("internal self-check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
