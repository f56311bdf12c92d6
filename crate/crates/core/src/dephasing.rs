//! Pure-dephasing spin-boson model at finite temperature under superposed
//! trajectories.
//!
//! A single path multiplies the qubit coherence by `φ_T(t) = e^{-Γ_T(t)}`
//! with `Γ_T(t) = 4∫ dω J(ω)/ω² coth(ω/2T)(1 - cos ωt)`. Cross-path terms
//! carry `√φ_T`, which after post-selection yields the modified dephasing
//! function `Φ(t, N, n)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{r_factor, InterferometerConfig, Op2, QubitState};
use crate::numerics::{bisect, integrate_adaptive_with_limit};
use crate::sinc;
use crate::SpectralDensity;

const EXPONENT_REL_TOL: f64 = 1e-11;
const EXPONENT_MAX_SUBDIVISIONS: usize = 200_000;

/// Bath spectrum and temperature (in frequency units, `k_B = 1`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DephasingParams {
    density: SpectralDensity,
    temperature: f64,
}

impl DephasingParams {
    pub fn new(density: SpectralDensity, temperature: f64) -> Result<Self> {
        if !(temperature >= 0.0 && temperature.is_finite()) {
            return Err(invalid("temperature", "must be finite and non-negative"));
        }
        Ok(Self { density, temperature })
    }

    pub fn density(&self) -> &SpectralDensity {
        &self.density
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// `coth(ω/2T)`, or 1 at zero temperature.
    pub fn thermal_factor(&self, omega: f64) -> f64 {
        if self.temperature == 0.0 {
            1.0
        } else {
            1.0 / (omega / (2.0 * self.temperature)).tanh()
        }
    }
}

/// Dephasing exponent `Γ_T(t)`.
///
/// The integrand is evaluated as `2t² J(ω) coth(ω/2T) sinc²(ωt/2)`, which is
/// the same function without the `(1 - cos ωt)/ω²` cancellation at small ω.
pub fn dephasing_exponent(params: &DephasingParams, t: f64) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("t", "must be finite and non-negative"));
    }
    let j = &params.density;
    if t == 0.0 || j.is_zero() {
        return Ok(0.0);
    }
    if params.temperature > 0.0 && j.low_frequency_exponent() < 1.0 {
        return Err(Error::InfraredSingular(format!(
            "J(ω) ~ ω^{} at T = {} makes the dephasing exponent infrared divergent",
            j.low_frequency_exponent(),
            params.temperature
        )));
    }
    let integrand = |w: f64| 2.0 * t * t * j.eval(w) * params.thermal_factor(w) * sinc(0.5 * w * t).powi(2);
    let mut cuts = vec![0.0];
    cuts.extend(j.breakpoints());
    // Resolve the first few oscillations of the filter separately.
    let first_zero = 2.0 * std::f64::consts::PI / t;
    cuts.extend((1..=4).map(|k| k as f64 * first_zero));
    cuts.push(j.omega_max());
    cuts.retain(|&w| w >= 0.0 && w <= j.omega_max());
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += integrate_adaptive_with_limit(integrand, w[0], w[1], EXPONENT_REL_TOL, 1e-15, EXPONENT_MAX_SUBDIVISIONS)?.value;
    }
    Ok(total)
}

/// `φ_T = e^{-Γ}`.
pub fn single_path_factor(gamma: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(invalid("gamma", "must be non-negative"));
    }
    Ok((-gamma).exp())
}

/// Weight `(N - 1) - (4n/N)(N - n)` of `√φ_T` in `Φ`; equals `N R - 1`.
pub fn dephasing_coefficient(paths: usize, pi_shifts: usize) -> f64 {
    let (n_paths, n) = (paths as f64, pi_shifts as f64);
    (n_paths - 1.0) - 4.0 * n / n_paths * (n_paths - n)
}

/// `Φ = (φ + c√φ)/(1 + c√φ)` with `c` from [`dephasing_coefficient`].
pub fn modified_dephasing(phi: f64, paths: usize, pi_shifts: usize) -> Result<f64> {
    if !(phi > 0.0 && phi <= 1.0) {
        return Err(invalid("phi", format!("{phi} outside (0, 1]")));
    }
    let cfg = InterferometerConfig::binary(paths, pi_shifts)?;
    if cfg.is_null() {
        return Err(Error::NullOutcome { probability: 0.0 });
    }
    let c = dephasing_coefficient(paths, pi_shifts);
    let root = phi.sqrt();
    let den = 1.0 + c * root;
    if !(den > 0.0) {
        return Err(Error::NonPhysical(format!("dephasing denominator {den} is not positive")));
    }
    Ok((phi + c * root) / den)
}

/// Unnormalized post-selected state `(1/N)ρ(t) + (R - 1/N)√φ ρ(0)`, where
/// `ρ(t)` is `ρ0` with its coherence scaled by `φ`.
pub fn postselected_state_deph(rho0: &QubitState, phi: f64, paths: usize, pi_shifts: usize) -> Result<QubitState> {
    if !rho0.is_normalized() {
        return Err(invalid("rho0", "must be normalized"));
    }
    if !(phi > 0.0 && phi <= 1.0) {
        return Err(invalid("phi", format!("{phi} outside (0, 1]")));
    }
    InterferometerConfig::binary(paths, pi_shifts)?;
    let m = rho0.matrix();
    let inv_n = 1.0 / paths as f64;
    let cross = (r_factor(paths, pi_shifts) - inv_n) * phi.sqrt();
    let pop = inv_n + cross;
    let coh = inv_n * phi + cross;
    QubitState::new(Op2::new(m[(0, 0)] * pop, m[(0, 1)] * coh, m[(1, 0)] * coh, m[(1, 1)] * pop))
}

/// Trace distance `|Φ|` of the post-selected `|±⟩` pair.
pub fn trace_distance_deph(modified: f64) -> f64 {
    modified.abs()
}

/// `Γ_T`, `φ_T` and `Φ` sampled at given times.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DephasingFactors {
    pub times: Vec<f64>,
    pub exponent: Vec<f64>,
    pub single_path: Vec<f64>,
    pub modified: Vec<f64>,
}

pub fn dephasing_factors(params: &DephasingParams, times: &[f64], paths: usize, pi_shifts: usize) -> Result<DephasingFactors> {
    let exponent = times.iter().map(|&t| dephasing_exponent(params, t)).collect::<Result<Vec<_>>>()?;
    let single_path = exponent.iter().map(|&g| single_path_factor(g)).collect::<Result<Vec<_>>>()?;
    let modified = single_path
        .iter()
        .map(|&phi| modified_dephasing(phi, paths, pi_shifts))
        .collect::<Result<Vec<_>>>()?;
    Ok(DephasingFactors {
        times: times.to_vec(),
        exponent,
        single_path,
        modified,
    })
}

/// Time in `[lo, hi]` where `Φ(t, N, n)` changes sign.
pub fn coherence_zero_crossing(params: &DephasingParams, paths: usize, pi_shifts: usize, lo: f64, hi: f64, t_tol: f64) -> Result<f64> {
    let phi_of = |t: f64| -> f64 {
        dephasing_exponent(params, t)
            .and_then(single_path_factor)
            .and_then(|phi| modified_dephasing(phi, paths, pi_shifts))
            .unwrap_or(f64::NAN)
    };
    bisect(phi_of, lo, hi, t_tol)
}

/// Time in `[lo, hi]` where `φ_T` reaches `target`.
pub fn single_path_level_crossing(params: &DephasingParams, target: f64, lo: f64, hi: f64, t_tol: f64) -> Result<f64> {
    let f = |t: f64| -> f64 {
        dephasing_exponent(params, t)
            .and_then(single_path_factor)
            .map(|phi| phi - target)
            .unwrap_or(f64::NAN)
    };
    bisect(f, lo, hi, t_tol)
}
