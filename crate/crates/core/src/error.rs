use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("no sign change on [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("{what} did not converge after {iterations} iterations (last residual {residual:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("argument {x} outside the domain of {what}")]
    OutOfDomain { what: &'static str, x: f64 },

    #[error("expected {expected} roots with negative real part, counted {found}")]
    RootCountMismatch { expected: i64, found: i64 },

    #[error("contour passes within {distance:e} (relative) of a zero; cannot count roots")]
    ContourTooClose { distance: f64 },

    #[error("net profit condition violated (drift {drift})")]
    NetProfitViolated { drift: f64 },

    #[error("linear system is singular (pivot {pivot:e})")]
    SingularSystem { pivot: f64 },

    #[error("boundary has {got} nodes, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("boundary nodes must be nondecreasing (node {index})")]
    UnsortedBoundary { index: usize },

    #[error("boundary node {index} = {value} outside [0, 1]")]
    OutOfRange { index: usize, value: f64 },

    #[error("order-statistics degree {degree} exceeds the stability cap {cap}")]
    StabilityCapExceeded { degree: usize, cap: usize },

    #[error("unknown quantity `{0}`")]
    UnknownQuantity(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
