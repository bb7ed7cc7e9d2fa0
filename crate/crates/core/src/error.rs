use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Inputs that were required to be related (e.g. consecutive Farey
    /// fractions) are not.
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    /// The truncated cell sum cannot be enclosed at this `kappa_max`.
    #[error("tail of the cell sum cannot be bounded: {0}")]
    UnboundedTail(String),
    #[error("cell cache: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
