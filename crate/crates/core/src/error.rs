use num_complex::Complex64;
use thiserror::Error;

/// A rejected input. Carries the offending field so front ends can map it
/// to a stable exit code without parsing text.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("{field} = {value} is outside the admissible interval {interval}")]
    OutOfRange {
        field: &'static str,
        value: f64,
        interval: &'static str,
    },
    #[error("relaxation times must satisfy 0 < tau_sigma < tau_eps (got tau_sigma = {tau_sigma}, tau_eps = {tau_eps})")]
    RelaxationOrder { tau_sigma: f64, tau_eps: f64 },
    #[error("time scale tau_eps^(1/alpha) is undefined for alpha = 0")]
    TimeScaleUndefined,
    #[error("{0}")]
    Invalid(String),
}

impl ValidationError {
    pub(crate) fn out_of_range(field: &'static str, value: f64, interval: &'static str) -> Self {
        ValidationError::OutOfRange {
            field,
            value,
            interval,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("argument {0} lies on the branch cut (-inf, 0]")]
    BranchCut(Complex64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{what} did not converge (achieved error estimate {estimate:.3e})")]
    NonConvergence { what: &'static str, estimate: f64 },
    #[error("zero too close to contour")]
    ZeroNearContour,
}

impl Error {
    /// True for failures caused by the caller's input rather than by the
    /// numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Validation(_) | Error::BranchCut(_) | Error::Domain(_)
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Validation(ValidationError::Invalid(msg.into()))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
