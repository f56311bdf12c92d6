//! Filter functions and overlap-integral decay factors.
//!
//! To leading order in the coupling, `γ(t) = ∫ dω J(ω) F(ω, t)`. Superposing
//! `N` paths scales the filter by `N/(N - 2n)²` without changing its shape;
//! the traditional Zeno filter with `Ñ` measurements instead widens by `Ñ`.

use serde::{Deserialize, Serialize};

use crate::dissipative::{decay_amplitude, decay_factor, memory_kernel, survival_probability_diss, DecayAmplitude};
use crate::error::{invalid, Error, Result};
use crate::model::InterferometerConfig;
use crate::numerics::{integrate_adaptive_with_limit, TimeGrid};
use crate::{sinc, SpectralDensity};

const OVERLAP_REL_TOL: f64 = 1e-12;
const OVERLAP_MAX_SUBDIVISIONS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterKind {
    DissSuperposed,
    DephSuperposed,
    DissTraditionalZeno,
}

/// A filter `F(ω)` at fixed time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub kind: FilterKind,
    pub paths: usize,
    pub pi_shifts: usize,
    /// Number of measurements `Ñ` for the traditional filter.
    pub measurements: f64,
    pub t: f64,
    pub omega_q: f64,
}

fn superposed_prefactor(paths: usize, pi_shifts: usize) -> Result<f64> {
    let cfg = InterferometerConfig::binary(paths, pi_shifts)?;
    if cfg.is_null() {
        return Err(Error::NullOutcome { probability: 0.0 });
    }
    Ok(paths as f64 / (paths as f64 - 2.0 * pi_shifts as f64).powi(2))
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(invalid("t", "must be finite and non-negative"))
    }
}

impl FilterSpec {
    pub fn diss(paths: usize, pi_shifts: usize, t: f64, omega_q: f64) -> Result<Self> {
        let spec = Self {
            kind: FilterKind::DissSuperposed,
            paths,
            pi_shifts,
            measurements: 1.0,
            t,
            omega_q,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn deph(paths: usize, pi_shifts: usize, t: f64) -> Result<Self> {
        let spec = Self {
            kind: FilterKind::DephSuperposed,
            paths,
            pi_shifts,
            measurements: 1.0,
            t,
            omega_q: 0.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn traditional(measurements: f64, t: f64, omega_q: f64) -> Result<Self> {
        let spec = Self {
            kind: FilterKind::DissTraditionalZeno,
            paths: 1,
            pi_shifts: 0,
            measurements,
            t,
            omega_q,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_time(self.t)?;
        if !self.omega_q.is_finite() {
            return Err(invalid("omega_q", "must be finite"));
        }
        match self.kind {
            FilterKind::DissTraditionalZeno => {
                if !(self.measurements >= 1.0 && self.measurements.is_finite()) {
                    return Err(invalid("measurements", "must be at least 1"));
                }
            }
            _ => {
                superposed_prefactor(self.paths, self.pi_shifts)?;
            }
        }
        Ok(())
    }

    /// Constant factor multiplying [`FilterSpec::base`].
    pub fn prefactor(&self) -> f64 {
        match self.kind {
            FilterKind::DissSuperposed => superposed_prefactor(self.paths, self.pi_shifts).unwrap_or(f64::NAN),
            FilterKind::DephSuperposed => 0.5 * superposed_prefactor(self.paths, self.pi_shifts).unwrap_or(f64::NAN),
            FilterKind::DissTraditionalZeno => 1.0 / self.measurements,
        }
    }

    /// Filter shape without the constant prefactor.
    pub fn base(&self, omega: f64) -> f64 {
        let t = self.t;
        match self.kind {
            FilterKind::DissSuperposed => t * t * sinc(0.5 * (omega - self.omega_q) * t).powi(2),
            FilterKind::DephSuperposed => 0.5 * t * t * sinc(0.5 * omega * t).powi(2),
            FilterKind::DissTraditionalZeno => t * t * sinc(0.5 * (omega - self.omega_q) * t / self.measurements).powi(2),
        }
    }

    pub fn eval(&self, omega: f64) -> f64 {
        self.prefactor() * self.base(omega)
    }

    /// Centre of the main lobe.
    pub fn centre(&self) -> f64 {
        match self.kind {
            FilterKind::DephSuperposed => 0.0,
            _ => self.omega_q,
        }
    }

    /// Spacing of the filter's zeros.
    pub fn zero_spacing(&self) -> f64 {
        let w = 2.0 * std::f64::consts::PI / self.t;
        match self.kind {
            FilterKind::DissTraditionalZeno => w * self.measurements,
            _ => w,
        }
    }
}

/// `N/(N-2n)² t² sinc²[(ω - ωq)t/2]`.
pub fn filter_diss(omega: f64, t: f64, paths: usize, pi_shifts: usize, omega_q: f64) -> Result<f64> {
    Ok(FilterSpec::diss(paths, pi_shifts, t, omega_q)?.eval(omega))
}

/// `½ N/(N-2n)² (1 - cos ωt)/ω²`, with the ω → 0 value `N/(N-2n)² t²/4`.
pub fn filter_deph(omega: f64, t: f64, paths: usize, pi_shifts: usize) -> Result<f64> {
    Ok(FilterSpec::deph(paths, pi_shifts, t)?.eval(omega))
}

/// `(t²/Ñ) sinc²[(ω - ωq)t/2Ñ]`.
pub fn filter_traditional_zeno(omega: f64, t: f64, measurements: f64, omega_q: f64) -> Result<f64> {
    Ok(FilterSpec::traditional(measurements, t, omega_q)?.eval(omega))
}

/// `γ = ∫_0^{ω_max} dω J(ω) F(ω)`.
///
/// The prefactor is applied after integrating the filter shape, so results
/// for different `(N, n)` differ by exactly that factor.
pub fn decay_factor_overlap(density: &SpectralDensity, filter: &FilterSpec) -> Result<f64> {
    filter.validate()?;
    if density.is_zero() || filter.t == 0.0 {
        return Ok(0.0);
    }
    let top = density.omega_max();
    let mut cuts = vec![0.0, top];
    cuts.extend(density.breakpoints());
    let centre = filter.centre();
    let spacing = filter.zero_spacing();
    cuts.push(centre);
    cuts.extend((1..=4).flat_map(|k| [centre - k as f64 * spacing, centre + k as f64 * spacing]));
    cuts.retain(|&w| (0.0..=top).contains(&w));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let integrand = |w: f64| density.eval(w) * filter.base(w);
    let scale = filter.t * filter.t * density.eval(centre.clamp(0.0, top)).max(1e-300);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += integrate_adaptive_with_limit(integrand, w[0], w[1], OVERLAP_REL_TOL, 1e-16 * scale, OVERLAP_MAX_SUBDIVISIONS)?.value;
    }
    Ok(filter.prefactor() * total.max(0.0))
}

/// Exact `-ln p` from the dissipative dynamics and the overlap-integral
/// estimate, both for `J` scaled by `ε²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbativeComparison {
    pub exact: f64,
    pub overlap: f64,
}

impl PerturbativeComparison {
    pub fn relative_mismatch(&self) -> f64 {
        (self.exact - self.overlap).abs() / self.overlap
    }
}

/// Compares the exact decay factor with its overlap-integral approximation.
///
/// The exact side integrates the memory equation with the quadrature kernel
/// on `[0, ω_max]`, the same domain as the overlap integral.
pub fn perturbative_consistency(
    density: &SpectralDensity,
    omega_q: f64,
    t: f64,
    paths: usize,
    pi_shifts: usize,
    epsilon: f64,
    dt: f64,
) -> Result<PerturbativeComparison> {
    if !epsilon.is_finite() {
        return Err(invalid("epsilon", "must be finite"));
    }
    let filter = FilterSpec::diss(paths, pi_shifts, t, omega_q)?;
    if epsilon == 0.0 || t == 0.0 {
        return Ok(PerturbativeComparison { exact: 0.0, overlap: 0.0 });
    }
    let scaled = density.clone().scaled(epsilon * epsilon)?;
    let grid = TimeGrid::from_zero(t, dt)?;
    let amplitude = DecayAmplitude::from_kernel(&memory_kernel(&scaled, omega_q)?, grid)?;
    let g = *amplitude.values().last().expect("grid has at least two points");
    let exact = decay_factor(survival_probability_diss(g, paths, pi_shifts)?)?;
    let overlap = decay_factor_overlap(&scaled, &filter)?;
    Ok(PerturbativeComparison { exact, overlap })
}

/// Exact decay factor `-ln p(t)` on a grid, from [`decay_amplitude`].
pub fn exact_decay_factor_series(density: &SpectralDensity, omega_q: f64, grid: TimeGrid, paths: usize, pi_shifts: usize) -> Result<Vec<f64>> {
    decay_amplitude(density, omega_q, grid)?
        .values()
        .iter()
        .map(|&g| decay_factor(survival_probability_diss(g, paths, pi_shifts)?))
        .collect()
}

/// Full width at half maximum of a sampled peak, by linear interpolation
/// between the samples that bracket the half level.
pub fn fwhm(omegas: &[f64], values: &[f64]) -> Result<f64> {
    if omegas.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: omegas.len(),
            found: values.len(),
        });
    }
    if omegas.len() < 3 {
        return Err(invalid("curve", "need at least three samples"));
    }
    let (peak, &max) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    if !(max > 0.0) {
        return Err(invalid("curve", "maximum must be positive"));
    }
    let half = 0.5 * max;
    let cross = |i: usize, j: usize| omegas[i] + (half - values[i]) * (omegas[j] - omegas[i]) / (values[j] - values[i]);
    let left = (1..=peak).rev().find(|&i| values[i - 1] < half).map(|i| cross(i - 1, i));
    let right = (peak..values.len() - 1).find(|&i| values[i + 1] < half).map(|i| cross(i, i + 1));
    match (left, right) {
        (Some(l), Some(r)) => Ok(r - l),
        _ => Err(invalid("curve", "no half-maximum crossing inside the sampled window")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn diss_filter_examples() {
        for t in [0.5, 2.0, 7.0] {
            assert_eq!(filter_diss(1.0, t, 1, 0, 1.0).unwrap(), t * t);
            assert!((filter_diss(1.0, t, 4, 0, 1.0).unwrap() - t * t / 4.0).abs() < 1e-15);
            assert!(filter_diss(1.0 + 2.0 * PI / t, t, 1, 0, 1.0).unwrap() < 1e-28);
        }
        assert!(filter_diss(1.0, 1.0, 4, 2, 1.0).is_err());
    }

    #[test]
    fn deph_filter_examples() {
        assert!(filter_deph(2.0 * PI, 1.0, 1, 0).unwrap() < 1e-30);
        assert!((filter_deph(1e-9, 2.0, 1, 0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(filter_deph(0.0, 2.0, 1, 0).unwrap(), 1.0);
        let v = filter_deph(1.0, 1.0, 3, 1).unwrap();
        assert!((v - 1.5 * (1.0 - 1f64.cos())).abs() < 1e-15);
        assert!((v - 0.689547).abs() < 1e-6);
    }

    #[test]
    fn traditional_filter_examples() {
        for w in [0.2, 1.0, 1.3, 4.0] {
            assert_eq!(filter_traditional_zeno(w, 3.0, 1.0, 1.0).unwrap(), filter_diss(w, 3.0, 1, 0, 1.0).unwrap());
        }
        assert_eq!(filter_traditional_zeno(1.0, 3.0, 4.0, 1.0).unwrap(), 9.0 / 4.0);
        assert!(filter_traditional_zeno(1.0 + 2.0 * PI * 4.0 / 3.0, 3.0, 4.0, 1.0).unwrap() < 1e-28);
        assert!(FilterSpec::traditional(0.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn zero_spectrum_overlap() {
        let f = FilterSpec::diss(1, 0, 2.0, 1.0).unwrap();
        assert_eq!(decay_factor_overlap(&SpectralDensity::zero(), &f).unwrap(), 0.0);
        let c = perturbative_consistency(&SpectralDensity::lorentzian(1.0, 0.1, 1.0).unwrap(), 1.0, 0.2, 1, 0, 0.0, 1e-3).unwrap();
        assert_eq!((c.exact, c.overlap), (0.0, 0.0));
    }

    #[test]
    fn fwhm_of_triangle() {
        let xs: Vec<f64> = (0..=200).map(|k| -2.0 + 0.02 * k as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (1.0 - x.abs()).max(0.0)).collect();
        assert!((fwhm(&xs, &ys).unwrap() - 1.0).abs() < 1e-12);
        assert!(fwhm(&xs[..90], &ys[..90]).is_err());
    }
}
