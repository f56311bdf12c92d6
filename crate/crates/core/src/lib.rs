//! Open-system dynamics of a qubit sent along superposed trajectories.
//!
//! A path register prepared in a uniform superposition steers the qubit
//! through `N` environments (or `N` positions of one environment); projecting
//! the register onto a phase-shifted superposition afterwards post-selects a
//! modified qubit evolution. This crate provides
//!
//! * exact post-selected dynamics of the dissipative (single-excitation) and
//!   pure-dephasing spin-boson models ([`dissipative`], [`dephasing`]),
//! * overlap-integral decay factors and filter functions ([`zeno_filter`]),
//!   including a general second-order engine ([`perturbation`]),
//! * the indefinite-position collective decay master equation ([`dicke`]),
//! * trace-distance and CP-divisibility diagnostics,
//!
//! on top of a small set of numerical kernels ([`numerics`]).

pub mod dephasing;
pub mod dicke;
pub mod dissipative;
mod error;
pub mod model;
pub mod numerics;
pub mod perturbation;
pub mod zeno_filter;

pub use error::{Error, Result};
pub use model::{InterferometerConfig, QubitState, SpectralDensity};
pub use numerics::{ComplexSeries, TimeGrid};

/// `sin(x)/x` with a series branch near zero.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}
