use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}` = {value}: must satisfy {constraint}")]
    InvalidParameter {
        field: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e}, requested {requested:e}")]
    NonConvergence {
        estimate: f64,
        error: f64,
        requested: f64,
    },

    #[error("delay step {tau_step} fs exceeds the sampling limit {max_step} fs")]
    NyquistViolation { tau_step: f64, max_step: f64 },

    #[error("regime case does not match inputs: {0}")]
    CaseMismatch(&'static str),

    #[error("efficiency requested at {omega} rad/fs, outside the curve range [{min}, {max}]")]
    EfficiencyOutOfRange { omega: f64, min: f64, max: f64 },

    #[error("measured width {measured} is not larger than the broadening {broadening}")]
    ImaginaryResult { measured: f64, broadening: f64 },

    #[error("grids differ: {0}")]
    GridMismatch(&'static str),

    #[error("need at least {min} samples, got {len}")]
    TooShort { len: usize, min: usize },

    #[error("Gaussian fit did not converge after {iterations} iterations")]
    FitNonConvergence { iterations: usize },

    #[error("zero denominator in {0}")]
    ZeroDenominator(&'static str),

    #[error("integrand does not decay: value {edge_value:e} at the support edge")]
    NonDecaying { edge_value: f64 },
}

/// Checks a scalar predicate and returns [`Error::InvalidParameter`] on failure.
pub(crate) fn ensure(
    ok: bool,
    field: &'static str,
    value: f64,
    constraint: &'static str,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            field,
            value,
            constraint,
        })
    }
}
