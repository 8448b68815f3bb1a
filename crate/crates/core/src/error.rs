use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the region where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// Shapes, dimensions or index sets do not fit together.
    #[error("structural error: {0}")]
    Structural(String),
    /// The model lacks the capability the operation needs (sampler, closed form, ...).
    #[error("capability error: {0}")]
    Capability(String),
    /// A numerical procedure produced a non-finite or otherwise unusable value.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// Parameters rejected at construction.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! domain_err {
    ($($arg:tt)*) => { $crate::error::Error::Domain(format!($($arg)*)) };
}
macro_rules! structural_err {
    ($($arg:tt)*) => { $crate::error::Error::Structural(format!($($arg)*)) };
}
macro_rules! capability_err {
    ($($arg:tt)*) => { $crate::error::Error::Capability(format!($($arg)*)) };
}
macro_rules! param_err {
    ($($arg:tt)*) => { $crate::error::Error::InvalidParameter(format!($($arg)*)) };
}
macro_rules! numeric_err {
    ($($arg:tt)*) => { $crate::error::Error::Numeric(format!($($arg)*)) };
}

pub(crate) use {capability_err, domain_err, numeric_err, param_err, structural_err};
