use thiserror::Error;

/// Every failure surfaced by the library.
///
/// Each variant maps to a stable, machine-readable category string (see
/// [`Error::category`]) which the command-line front end prints and turns
/// into an exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("resolution: {0}")]
    Resolution(String),

    #[error("source is not mean-free: mean {mean:e} exceeds tolerance {tolerance:e}")]
    NonMeanFreeSource { mean: f64, tolerance: f64 },

    #[error("source has magnetic content {magnitude:e} above tolerance {tolerance:e}")]
    NonElectricSource { magnitude: f64, tolerance: f64 },

    #[error("source has l=1 content {magnitude:e} above tolerance {tolerance:e}; l <= 1 has no STT preimage")]
    KernelObstruction { magnitude: f64, tolerance: f64 },

    #[error("kernel quadrature: source node coincides with target node (1 - cos = {separation:e})")]
    GridCollision { separation: f64 },

    #[error("range: {0}")]
    Range(String),

    #[error("field `{0}` is required but absent")]
    AbsentField(String),

    #[error("domain: {0}")]
    Domain(String),

    #[error("integrator: {0}")]
    Integrator(String),

    #[error("internal consistency: {0}")]
    Consistency(String),

    #[error("spec: {0}")]
    Spec(String),

    #[error("shape mismatch in `{field}`: {detail}")]
    Shape { field: String, detail: String },

    #[error("u-integral does not converge: tail exponent {exponent:.3} for `{field}`")]
    NonConvergentTail { field: String, exponent: f64 },
}

impl Error {
    pub fn category(&self) -> &'static str {
        match self {
            Error::Resolution(_) => "resolution",
            Error::NonMeanFreeSource { .. } => "non-mean-free-source",
            Error::NonElectricSource { .. } => "non-electric-source",
            Error::KernelObstruction { .. } => "kernel-obstruction",
            Error::GridCollision { .. } => "grid-collision",
            Error::Range(_) => "range",
            Error::AbsentField(_) => "absent-field",
            Error::Domain(_) => "domain",
            Error::Integrator(_) => "integrator",
            Error::Consistency(_) => "consistency",
            Error::Spec(_) => "spec",
            Error::Shape { .. } => "shape",
            Error::NonConvergentTail { .. } => "non-convergent-tail",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
