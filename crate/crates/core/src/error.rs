use thiserror::Error;

/// Errors produced by the numerical and exact routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity exceeded: {what} needs {needed}, cap is {cap}")]
    Capacity {
        what: &'static str,
        needed: usize,
        cap: usize,
    },

    #[error("singular denominator in moment recursion at (p={p}, q={q}, k={k})")]
    SingularDenominator { p: i64, q: i64, k: u32 },

    #[error("index {index} outside 1..={max}")]
    Index { index: usize, max: usize },

    #[error("covariance factorization failed even with diagonal jitter {jitter:e}")]
    IllConditioned { jitter: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Domain(format!("{name}={v} is outside [0, 1]")));
    }
    Ok(())
}

pub(crate) fn check_symmetric_interval(name: &str, v: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&v) {
        return Err(Error::Domain(format!("{name}={v} is outside [-1, 1]")));
    }
    Ok(())
}
