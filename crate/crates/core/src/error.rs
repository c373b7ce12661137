use thiserror::Error;

/// Errors raised by the calibration and regret-bound routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("{what} = {value} is outside {expected}")]
    Domain {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// A curve, distribution or assignment violated its structural invariants.
    #[error("invalid {0}")]
    Invalid(String),

    /// An infinite score was requested from a partial loss that declares no limit there.
    #[error("partial loss declares no limit at {0}")]
    UnsupportedLimit(&'static str),

    /// The inputs do not satisfy the preconditions of the requested method.
    #[error("precondition not met: {0}")]
    Precondition(String),

    /// The (family, parameter) combination has no closed form.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// The loss is not calibrated for the requested cost, so the transfer function is not invertible.
    #[error("regret bound is vacuous: {0}")]
    VacuousBound(String),

    /// Two independent computations of the same quantity disagreed.
    #[error("inconsistent results: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit(what: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value,
            expected: "[0, 1]",
        })
    }
}
