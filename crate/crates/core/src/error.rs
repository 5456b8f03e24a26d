use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid value for `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("stress lies outside the yield domain (max violation {violation:e})")]
    MembershipViolation { violation: f64 },

    #[error("no strictly admissible stress found at the hydrostatic probe (function {index})")]
    SlaterViolation { index: usize },

    #[error("yield function gradient vanishes on the yield surface")]
    DegenerateGradient,

    #[error(
        "saturated gradients are nearly collinear (cosine {cosine}); merge them into one function"
    )]
    CollinearGradients { cosine: f64 },

    #[error("Tresca function is not differentiable at coincident eigenvalues; use the degenerate projection")]
    NotDifferentiable,

    #[error("all three eigenvalues coincide; such a stress cannot lie on the Tresca surface")]
    TripleEigenvalue,

    #[error("expected exactly two coincident eigenvalues")]
    NotDegenerate,

    #[error("{count} simultaneously saturated constraints are not supported")]
    UnsupportedSaturation { count: usize },

    #[error("time step {dt:e} violates the CFL limit {limit:e}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("integration failed at step {step}: {reason}")]
    IntegrationFailure { step: usize, reason: String },

    #[error("oracle did not converge within {iterations} iterations")]
    OracleFailure { iterations: usize },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// Whether the error stems from bad input rather than numerical trouble.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::SlaterViolation { .. }
                | Error::CflViolation { .. }
        )
    }
}
