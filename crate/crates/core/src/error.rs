use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or argument lies outside the domain of the function.
    #[error("{name} = {value} is out of domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A data value is not strictly above the cutoff.
    #[error("value {value} at position {index} is not above the cutoff {xm}")]
    CutoffViolation { index: usize, value: f64, xm: f64 },

    #[error("empty sample")]
    EmptySample,

    #[error("{what} needs at least {needed} points, got {got}")]
    TooFewPoints {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    /// The estimator's formula has a zero denominator on this input.
    #[error("estimate undefined: {0}")]
    Undefined(&'static str),

    #[error("invalid experiment grid: {0}")]
    InvalidGrid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            reason,
        }
    }

    /// True when the error stems from bad input rather than from I/O.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Csv(_))
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(
            name,
            value,
            "must be finite and strictly positive",
        ))
    }
}

pub(crate) fn check_unit_interval(u: f64) -> Result<()> {
    if u > 0.0 && u <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain("u", u, "must lie in (0, 1]"))
    }
}
