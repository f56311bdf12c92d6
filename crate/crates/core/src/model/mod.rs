//! Spectral densities, interferometer settings, qubit states, and the
//! superposition/post-selection algebra shared by every scenario.

mod interferometer;
mod spectral;
mod state;

pub use interferometer::{phase_pair_sum, r_factor, InterferometerConfig, PhaseSetting};
pub use spectral::{SpectralDensity, SpectralShape};
pub use state::{
    eigenvalues2, hermitian_deviation2, sigma_minus, sigma_plus, sigma_x, sigma_y, sigma_z, Op2, PathBlockMatrix,
    QubitState, EXCITED, GROUND, STATE_TOL,
};

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Post-selection success probabilities below this count as a null outcome.
pub const NULL_TRACE: f64 = 1e-14;

/// Projects the path register onto `|χ_φ⟩`:
/// `(1/N²) Σ_{i,j} e^{-i(φ_i - φ_j)} ρ_{Q,i,j}`.
pub fn postselect_general(blocks: &PathBlockMatrix, phases: &[f64]) -> Result<QubitState> {
    let n = blocks.paths();
    if phases.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: phases.len(),
        });
    }
    let mut acc = Op2::zeros();
    for (i, &pi) in phases.iter().enumerate() {
        for (j, &pj) in phases.iter().enumerate() {
            let w = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::from_polar(1.0, -(pi - pj)) };
            acc += blocks.block(i, j) * w;
        }
    }
    let scale = 1.0 / (n * n) as f64;
    let mut out = acc.map(|z| z * scale);
    // Pairwise sums are Hermitian up to rounding; remove the residue.
    out = (out + out.adjoint()).map(|z| z * 0.5);
    Ok(QubitState::from_raw(out))
}

/// Identical-environment form `ρ/N + (R - 1/N) β` in binary phase mode.
pub fn superpose_identical(single: &QubitState, beta: &QubitState, config: &InterferometerConfig) -> Result<QubitState> {
    let n = config
        .pi_shifts()
        .ok_or_else(|| invalid("config", "identical-path superposition needs binary phases"))?;
    let paths = config.paths() as f64;
    let r = r_factor(config.paths(), n);
    let m = single.matrix().map(|z| z / paths) + beta.matrix().map(|z| z * (r - 1.0 / paths));
    Ok(QubitState::from_raw(m))
}

/// Splits an unnormalized post-selected state into the normalized state and
/// the success probability (its trace).
pub fn normalize(state: &QubitState) -> Result<(QubitState, f64)> {
    let p = state.trace();
    if p < -NULL_TRACE {
        return Err(invalid("state", format!("negative trace {p}")));
    }
    if p < NULL_TRACE {
        return Err(Error::NullOutcome { probability: p });
    }
    let mut normalized = QubitState::from_raw(state.matrix().map(|z| z / p));
    normalized.set_normalized();
    Ok((normalized, p))
}
