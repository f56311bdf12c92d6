use thiserror::Error;

/// Errors raised by the simulation kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Completely destructive interference: the post-selection has zero
    /// success probability.
    #[error("null post-selection outcome (success probability {probability:e})")]
    NullOutcome { probability: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error:e}")]
    NonConvergence { estimate: f64, error: f64 },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    /// The dephasing exponent integrand is infrared singular for the
    /// requested spectrum and temperature.
    #[error("dephasing exponent is infrared singular: {0}")]
    InfraredSingular(String),

    #[error("non-physical regime: {0}")]
    NonPhysical(String),

    #[error("generator is not trace preserving (max |tr L(E)| = {deviation:e})")]
    TraceNotPreserved { deviation: f64 },

    #[error("division by vanishing amplitude |G(t)| = {0:e}")]
    VanishingAmplitude(f64),

    #[error("root not bracketed on [{lo}, {hi}]")]
    RootNotBracketed { lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
