use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("covariance matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("uncertainty bound violated: symplectic eigenvalue {value:e} < {bound:e}")]
    UncertaintyViolation { value: f64, bound: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("quadrature did not converge: estimated relative error {error:e} after {subdivisions} subdivisions")]
    QuadratureNonConvergence { error: f64, subdivisions: usize },

    #[error("integrator step size underflow at t = {t:e} (h = {step:e})")]
    StepSizeUnderflow { t: f64, step: f64 },

    #[error("time grid must be strictly increasing (index {0})")]
    NonMonotonicGrid(usize),

    #[error("fock cutoff insufficient: population {population:e} at level {level}")]
    CutoffLeak { level: usize, population: f64 },

    #[error("config error at `{key}`: {reason}")]
    Config { key: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure(cond: bool, name: &'static str, reason: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: reason.into(),
        })
    }
}

pub(crate) fn ensure_finite(value: f64, name: &'static str) -> Result<()> {
    ensure(
        value.is_finite(),
        name,
        format!("must be finite, got {value}"),
    )
}
