use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Interference weight `(N - 2n)² / N²` of the post-selected outcome with
/// `n` of the `N` phase shifters set to π.
pub fn r_factor(paths: usize, pi_shifts: usize) -> f64 {
    assert!(paths >= 1, "at least one path required");
    assert!(pi_shifts <= paths, "n must not exceed N");
    let n = paths as f64;
    let d = n - 2.0 * pi_shifts as f64;
    d * d / (n * n)
}

/// Phase-shifter settings of the recombining beam splitter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseSetting {
    /// Arbitrary phases `φ_i`, one per path.
    Vector(Vec<f64>),
    /// `n` shifters at π, the rest at 0.
    Binary { pi_shifts: usize },
}

/// `N` paths plus the phase settings of the post-selected projector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterferometerConfig {
    paths: usize,
    phases: PhaseSetting,
}

impl InterferometerConfig {
    pub fn binary(paths: usize, pi_shifts: usize) -> Result<Self> {
        if paths == 0 {
            return Err(invalid("N", "need at least one path"));
        }
        if pi_shifts > paths {
            return Err(invalid("n", format!("n = {pi_shifts} exceeds N = {paths}")));
        }
        Ok(Self {
            paths,
            phases: PhaseSetting::Binary { pi_shifts },
        })
    }

    pub fn with_phases(phases: Vec<f64>) -> Result<Self> {
        if phases.is_empty() {
            return Err(invalid("phases", "need at least one path"));
        }
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(invalid("phases", "phases must be finite"));
        }
        Ok(Self {
            paths: phases.len(),
            phases: PhaseSetting::Vector(phases),
        })
    }

    pub fn paths(&self) -> usize {
        self.paths
    }

    pub fn phases(&self) -> &PhaseSetting {
        &self.phases
    }

    /// `n` in binary mode.
    pub fn pi_shifts(&self) -> Option<usize> {
        match self.phases {
            PhaseSetting::Binary { pi_shifts } => Some(pi_shifts),
            PhaseSetting::Vector(_) => None,
        }
    }

    /// Explicit phase vector; binary settings put π on the first `n` paths.
    pub fn phase_vector(&self) -> Vec<f64> {
        match &self.phases {
            PhaseSetting::Vector(v) => v.clone(),
            PhaseSetting::Binary { pi_shifts } => (0..self.paths).map(|i| if i < *pi_shifts { PI } else { 0.0 }).collect(),
        }
    }

    /// `|Σ_k e^{-iφ_k}|² / N²`; equals [`r_factor`] in binary mode.
    pub fn interference_weight(&self) -> f64 {
        match &self.phases {
            PhaseSetting::Binary { pi_shifts } => r_factor(self.paths, *pi_shifts),
            PhaseSetting::Vector(v) => {
                let n = self.paths as f64;
                phase_pair_sum(v).re / (n * n)
            }
        }
    }

    /// Completely destructive interference (`n = N/2` in binary mode).
    pub fn is_null(&self) -> bool {
        match &self.phases {
            PhaseSetting::Binary { pi_shifts } => 2 * pi_shifts == self.paths,
            PhaseSetting::Vector(_) => self.interference_weight() < 1e-14,
        }
    }
}

/// `Σ_{k,l} e^{-i(φ_k - φ_l)}`, summing each conjugate pair `(k, l), (l, k)`
/// together so the result is exactly real.
pub fn phase_pair_sum(phases: &[f64]) -> Complex64 {
    let mut sum = phases.len() as f64;
    for (k, &pk) in phases.iter().enumerate() {
        for &pl in &phases[k + 1..] {
            sum += 2.0 * (pk - pl).cos();
        }
    }
    Complex64::new(sum, 0.0)
}
