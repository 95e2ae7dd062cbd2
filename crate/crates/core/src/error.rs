use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Input outside the domain of the operation (non-Hermitian generator,
    /// non-faithful state, mismatched shapes, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The operation is well defined but not implemented for this input class.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A numerical procedure did not reach its tolerance.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
