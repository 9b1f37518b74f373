use thiserror::Error;

/// Errors shared by every stage of the certification pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Operands or inputs have incompatible shape: mismatched rings, dimensions
    /// or unknown variables.
    #[error("structural error: {0}")]
    Structural(String),

    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configured budget (pairing factors, basis size, time) was exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// The monomial basis cannot represent a term of the target polynomial.
    #[error("basis insufficient: monomial {0} is not a product of two basis monomials")]
    BasisInsufficient(String),

    /// A certificate or Gram matrix failed an exact check.
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! structural {
    ($($arg:tt)*) => { $crate::error::Error::Structural(format!($($arg)*)) };
}

macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::Domain(format!($($arg)*)) };
}

pub(crate) use domain;
pub(crate) use structural;
