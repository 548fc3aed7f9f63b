use alloc::string::String;

/// Errors raised by the geometry kernels.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("singular matrix in linear solve")]
    Singular,
    #[error("non-finite intermediate in exponential action (m = {m}, s = {s})")]
    Numerical { m: usize, s: usize },
    #[error("operator domain has {entries} entries, above the exhaustive cap of {cap}; use an analytic norm bound")]
    Capacity { entries: usize, cap: usize },
    #[error("degenerate subspace: the Gram matrix of the basis is singular")]
    DegenerateSubspace,
    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: &'static str },
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! dim_err {
    ($($arg:tt)*) => { $crate::error::Error::Dimension(alloc::format!($($arg)*)) };
}

macro_rules! invalid {
    ($($arg:tt)*) => { $crate::error::Error::Validation(alloc::format!($($arg)*)) };
}

pub(crate) use dim_err;
pub(crate) use invalid;
