use std::fmt;

use thiserror::Error;

/// Problems found while validating a candidate stochastic matrix.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub issues: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }

    pub(crate) fn push(&mut self, issue: impl Into<String>) {
        self.issues.push(issue.into());
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.issues.join("; "))
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid stochastic matrix: {0}")]
    Validation(ValidationReport),

    #[error("parameter {name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid marked set: {0}")]
    MarkedSet(String),

    #[error("chain is not ergodic")]
    NotErgodic,

    #[error("chain is not reversible (detailed-balance residual {0:e})")]
    NotReversible(f64),

    #[error("chain is not lazy: eigenvalue {0} is negative")]
    NotLazy(f64),

    #[error("ill-conditioned spectrum: eigenvalue {value} at index {index} is within {tol:e} of 1")]
    IllConditioned { index: usize, value: f64, tol: f64 },

    #[error("random walk did not reach the marked set within {0} total steps")]
    Timeout(u64),

    #[error("eigenvalue {0} lies outside [-1, 1] beyond the clamp threshold")]
    EigenvalueOutOfRange(f64),

    #[error("unitary completion failed: residual {0:e}")]
    Completion(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("post-selection probability {0:e} is too small")]
    DegeneratePostSelection(f64),

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("size {n} exceeds the cost guard of {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    range: &'static str,
    ok: bool,
) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value, range })
    }
}
