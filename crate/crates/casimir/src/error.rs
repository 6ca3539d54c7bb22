use alloc::string::String;
use num_complex::Complex64;

/// Failure modes shared by every computation in the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A caller-supplied argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// The requested point lies outside the domain where the quantity is finite.
    #[error("domain error: {0}")]
    Domain(String),
    /// A numerical procedure did not reach its tolerance. `best` is the last estimate.
    #[error("accuracy target missed: err {err:.3e} exceeds tol {tol:.3e} (best value {best})")]
    Accuracy { best: Complex64, err: f64, tol: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
