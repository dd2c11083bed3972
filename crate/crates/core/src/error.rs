use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Every failure mode of the library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the documented domain.
    Domain(String),
    /// Adaptive quadrature or an iteration ran out of budget.
    NonConvergence { estimate: f64, error: f64 },
    /// Root bracket without a sign change.
    BadBracket { lo: f64, hi: f64 },
    /// ODE step size underflowed.
    StepFailure { t: f64 },
    /// Hypergeometric series failed to converge.
    DivergentSeries { z: f64 },
    /// The two branches of a profile disagree at the branch point.
    MatchFailure { residual: f64 },
    /// Evaluation outside the tabulated span of a cache.
    CacheRange { t: f64 },
    /// Threshold search found no admissible alpha.
    NoPositiveAlpha,
    /// Nonlinear iteration lost positivity.
    SignError { index: usize },
    /// Monte Carlo standard error above the admissible fraction.
    VarianceBlowup { estimate: f64, std_error: f64 },
    /// Monte Carlo margin within three standard errors of zero.
    InconclusiveMc { margin: f64, std_error: f64 },
    /// A certified inequality failed at a witness point.
    MarginViolation { case: String, witness: alloc::vec::Vec<f64>, margin: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::NonConvergence { estimate, error } => {
                write!(f, "no convergence (estimate {estimate:e}, error {error:e})")
            }
            Error::BadBracket { lo, hi } => write!(f, "no sign change on [{lo}, {hi}]"),
            Error::StepFailure { t } => write!(f, "step size underflow at t = {t}"),
            Error::DivergentSeries { z } => write!(f, "hypergeometric series diverges at z = {z}"),
            Error::MatchFailure { residual } => write!(f, "branch mismatch {residual:e}"),
            Error::CacheRange { t } => write!(f, "t = {t} outside the tabulated range"),
            Error::NoPositiveAlpha => write!(f, "no admissible alpha"),
            Error::SignError { index } => write!(f, "iterate changed sign at node {index}"),
            Error::VarianceBlowup { estimate, std_error } => {
                write!(f, "standard error {std_error:e} too large for estimate {estimate:e}")
            }
            Error::InconclusiveMc { margin, std_error } => {
                write!(f, "margin {margin:e} within three standard errors ({std_error:e})")
            }
            Error::MarginViolation { case, witness, margin } => {
                write!(f, "{case}: margin {margin:e} at {witness:?}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn domain(msg: &str) -> Error {
    Error::Domain(String::from(msg))
}
