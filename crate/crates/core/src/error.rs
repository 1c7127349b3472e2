use thiserror::Error;

/// Errors reported by the matrix, reduction and classification layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Dimensions do not admit the requested operation.
    #[error("shape error: {0}")]
    Shape(String),

    /// A sesquilinear form was requested over a real scalar type.
    #[error("invalid form: {0}")]
    InvalidForm(String),

    /// The argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition does not hold for the given input.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The operation is not available for this scalar backend.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
