//! Single-excitation dissipative spin-boson model under superposed
//! trajectories.
//!
//! Each path sees an identical zero-temperature bath. The excited amplitude
//! of a single path obeys `c_e'(t) = -∫_0^t f(t-τ) c_e(τ) dτ` with memory
//! kernel `f(t) = ∫ dω J(ω) e^{i(ωq-ω)t}`; its solution with `c_e(0) = 1` is
//! the dissipation function `G(t)`. Everything observable after
//! post-selection follows from `G(t)` and `R_{N,n}`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{normalize, r_factor, InterferometerConfig, Op2, QubitState, SpectralDensity, SpectralShape, NULL_TRACE};
use crate::numerics::{integrate_adaptive, min_eigenvalue_hermitian, solve_volterra_sampled, ComplexSeries, TimeGrid};

/// Relative tolerance of the kernel quadrature.
const KERNEL_REL_TOL: f64 = 1e-11;

/// Closed-form Lorentzian runs are used when `λ ≤ CLOSED_FORM_WIDTH · ωq`.
pub const CLOSED_FORM_WIDTH: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelSource {
    NumericFromJ,
    LorentzianClosed,
}

#[derive(Debug, Clone)]
enum KernelImpl {
    Numeric { density: SpectralDensity, omega_q: f64, weight: f64 },
    Lorentzian { gamma0: f64, lambda: f64 },
}

/// Memory kernel `f(t)` of the amplitude equation.
#[derive(Debug, Clone)]
pub struct MemoryKernel {
    inner: KernelImpl,
}

/// Kernel `f(t) = ∫_0^{ω_max} dω J(ω) e^{i(ωq-ω)t}` evaluated by quadrature.
pub fn memory_kernel(density: &SpectralDensity, omega_q: f64) -> Result<MemoryKernel> {
    if !omega_q.is_finite() {
        return Err(invalid("omega_q", "must be finite"));
    }
    let mut kernel = MemoryKernel {
        inner: KernelImpl::Numeric {
            density: density.clone(),
            omega_q,
            weight: 0.0,
        },
    };
    let weight = kernel.eval(0.0)?.re;
    if let KernelImpl::Numeric { weight: w, .. } = &mut kernel.inner {
        *w = weight;
    }
    Ok(kernel)
}

/// Splits `[0, ω_max]` at the spectrum's breakpoints.
fn pieces(density: &SpectralDensity) -> Vec<(f64, f64)> {
    let mut cuts = vec![0.0];
    cuts.extend(density.breakpoints());
    cuts.push(density.omega_max());
    cuts.windows(2).map(|w| (w[0], w[1])).filter(|(a, b)| b > a).collect()
}

/// Integrates a complex function of ω against the pieces of `J`'s support.
pub(crate) fn integrate_over_spectrum<F>(density: &SpectralDensity, rel_tol: f64, abs_tol: f64, f: F) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let mut total = Complex64::new(0.0, 0.0);
    for (a, b) in pieces(density) {
        total += integrate_adaptive(&f, a, b, rel_tol, abs_tol)?.value;
    }
    Ok(total)
}

impl MemoryKernel {
    /// Full-line Lorentzian kernel `(γ0 λ / 2) e^{-λ t}`.
    pub fn lorentzian_closed(gamma0: f64, lambda: f64) -> Result<Self> {
        if !(gamma0 >= 0.0 && gamma0.is_finite()) {
            return Err(invalid("gamma0", "must be non-negative"));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid("lambda", "must be positive"));
        }
        Ok(Self {
            inner: KernelImpl::Lorentzian { gamma0, lambda },
        })
    }

    pub fn source(&self) -> KernelSource {
        match self.inner {
            KernelImpl::Numeric { .. } => KernelSource::NumericFromJ,
            KernelImpl::Lorentzian { .. } => KernelSource::LorentzianClosed,
        }
    }

    pub fn eval(&self, t: f64) -> Result<Complex64> {
        match &self.inner {
            KernelImpl::Lorentzian { gamma0, lambda } => Ok(Complex64::new(0.5 * gamma0 * lambda * (-lambda * t.abs()).exp(), 0.0)),
            KernelImpl::Numeric { density, omega_q, weight } => {
                if density.is_zero() {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                let abs_tol = 1e-14 * weight.max(f64::MIN_POSITIVE);
                integrate_over_spectrum(density, KERNEL_REL_TOL, abs_tol, |w| {
                    Complex64::from_polar(density.eval(w), (omega_q - w) * t)
                })
            }
        }
    }

    /// `f(k dt)` for every grid index.
    pub fn sample(&self, grid: &TimeGrid) -> Result<Vec<Complex64>> {
        (0..grid.count()).map(|k| self.eval(k as f64 * grid.dt())).collect()
    }
}

/// Where a [`DecayAmplitude`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeSource {
    Volterra,
    LorentzianClosedForm,
}

/// Time series of the dissipation function `G(t)`.
#[derive(Debug, Clone)]
pub struct DecayAmplitude {
    series: ComplexSeries,
    source: AmplitudeSource,
}

impl DecayAmplitude {
    fn checked(series: ComplexSeries, source: AmplitudeSource) -> Result<Self> {
        if series.values()[0] != Complex64::new(1.0, 0.0) {
            return Err(Error::NonPhysical(format!("G(0) = {} != 1", series.values()[0])));
        }
        if let Some((t, g)) = series.iter().find(|(_, g)| !(g.norm() <= 1.0 + 1e-9)) {
            return Err(Error::NonPhysical(format!("|G({t})| = {} exceeds 1", g.norm())));
        }
        Ok(Self { series, source })
    }

    /// Solves the amplitude equation for a given kernel with `c(0) = 1`.
    pub fn from_kernel(kernel: &MemoryKernel, grid: TimeGrid) -> Result<Self> {
        let samples = kernel.sample(&grid)?;
        let series = solve_volterra_sampled(&samples, grid, Complex64::new(1.0, 0.0))?;
        Self::checked(series, AmplitudeSource::Volterra)
    }

    /// Closed-form Lorentzian amplitude on a grid.
    pub fn lorentzian_closed(gamma0: f64, lambda: f64, grid: TimeGrid) -> Result<Self> {
        let values = grid
            .times()
            .map(|t| decay_amplitude_lorentzian_closed(gamma0, lambda, t))
            .collect::<Result<Vec<_>>>()?;
        Self::checked(ComplexSeries::new(grid, values)?, AmplitudeSource::LorentzianClosedForm)
    }

    pub fn series(&self) -> &ComplexSeries {
        &self.series
    }

    pub fn values(&self) -> &[Complex64] {
        self.series.values()
    }

    pub fn grid(&self) -> &TimeGrid {
        self.series.grid()
    }

    pub fn source(&self) -> AmplitudeSource {
        self.source
    }

    /// `|G(t)|²` on the grid.
    pub fn survival(&self) -> Vec<f64> {
        self.values().iter().map(|g| g.norm_sqr()).collect()
    }
}

/// Dissipation function for `J` on `grid`.
///
/// Narrow Lorentzians (`λ ≤ 0.02 ωq`) use the closed pole form, everything
/// else integrates the memory equation with the quadrature kernel.
pub fn decay_amplitude(density: &SpectralDensity, omega_q: f64, grid: TimeGrid) -> Result<DecayAmplitude> {
    if let SpectralShape::Lorentzian { gamma0, lambda, .. } = density.shape() {
        if *lambda <= CLOSED_FORM_WIDTH * omega_q {
            return DecayAmplitude::lorentzian_closed(gamma0 * density.scale(), *lambda, grid);
        }
    }
    DecayAmplitude::from_kernel(&memory_kernel(density, omega_q)?, grid)
}

/// `G(t) = e^{-λt/2}[cosh(δt/2) + (λ/δ) sinh(δt/2)]`, `δ = √(λ² - 2γ0λ)`.
pub fn decay_amplitude_lorentzian_closed(gamma0: f64, lambda: f64, t: f64) -> Result<Complex64> {
    if !(gamma0 >= 0.0 && gamma0.is_finite()) {
        return Err(invalid("gamma0", "must be non-negative"));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid("lambda", "must be positive"));
    }
    let delta_sq = lambda * lambda - 2.0 * gamma0 * lambda;
    let half_t = 0.5 * t;
    let z2 = delta_sq * half_t * half_t;
    let g = if z2.abs() < 1e-6 {
        // cosh z + (λt/2) sinh(z)/z as even series in z.
        let cosh = 1.0 + z2 / 2.0 + z2 * z2 / 24.0;
        let sinhc = 1.0 + z2 / 6.0 + z2 * z2 / 120.0;
        (-lambda * half_t).exp() * (cosh + lambda * half_t * sinhc)
    } else if delta_sq > 0.0 {
        let delta = delta_sq.sqrt();
        let ratio = lambda / delta;
        0.5 * (1.0 + ratio) * (-(lambda - delta) * half_t).exp() + 0.5 * (1.0 - ratio) * (-(lambda + delta) * half_t).exp()
    } else {
        let nu = (-delta_sq).sqrt();
        (-lambda * half_t).exp() * ((nu * half_t).cos() + lambda / nu * (nu * half_t).sin())
    };
    Ok(Complex64::new(g, 0.0))
}

fn binary_r(paths: usize, pi_shifts: usize) -> Result<f64> {
    InterferometerConfig::binary(paths, pi_shifts)?;
    Ok(r_factor(paths, pi_shifts))
}

/// Unnormalized post-selected state for initial `c_e|e⟩ + c_g|g⟩`.
pub fn postselected_state_diss(c_e0: Complex64, c_g0: Complex64, g: Complex64, paths: usize, pi_shifts: usize) -> Result<QubitState> {
    let norm = c_e0.norm_sqr() + c_g0.norm_sqr();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(invalid("amplitudes", format!("|c_e|² + |c_g|² = {norm}, expected 1")));
    }
    let r = binary_r(paths, pi_shifts)?;
    let g2 = g.norm_sqr();
    let pe = c_e0.norm_sqr();
    let ee = Complex64::new(r * g2 * pe, 0.0);
    let eg = g * c_e0 * c_g0.conj() * r;
    let gg = Complex64::new(r * c_g0.norm_sqr() + pe * (1.0 - g2) / paths as f64, 0.0);
    QubitState::new(Op2::new(ee, eg, eg.conj(), gg))
}

/// Survival probability of `|e⟩` after post-selection,
/// `R|G|² / (R|G|² + (1 - |G|²)/N)`.
pub fn survival_probability_diss(g: Complex64, paths: usize, pi_shifts: usize) -> Result<f64> {
    let r = binary_r(paths, pi_shifts)?;
    let g2 = g.norm_sqr();
    let kept = r * g2;
    let total = kept + (1.0 - g2) / paths as f64;
    if total < NULL_TRACE {
        return Err(Error::NullOutcome { probability: total });
    }
    Ok(kept / total)
}

/// `γ = -ln p`.
pub fn decay_factor(p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::NullOutcome { probability: p });
    }
    Ok(-p.ln())
}

/// Trace distance of the post-selected `|±⟩` pair,
/// `2R|G| / (R|G|² + R + (1 - |G|²)/N)`.
pub fn trace_distance_diss(g: Complex64, paths: usize, pi_shifts: usize) -> Result<f64> {
    let cfg = InterferometerConfig::binary(paths, pi_shifts)?;
    if cfg.is_null() {
        return Err(Error::NullOutcome { probability: 0.0 });
    }
    let n = paths as f64;
    let a = (n - 2.0 * pi_shifts as f64).powi(2);
    let g2 = g.norm_sqr();
    Ok(2.0 * a * g.norm() / ((a - n) * g2 + a + n))
}

/// Trace distance at every grid point.
pub fn trace_distance_series(amplitude: &DecayAmplitude, paths: usize, pi_shifts: usize) -> Result<Vec<f64>> {
    amplitude.values().iter().map(|&g| trace_distance_diss(g, paths, pi_shifts)).collect()
}

/// Choi matrix of the intermediate map from `t` to `t + τ`, with
/// `r = G(t+τ)/G(t)` and `N̄ = N/(N - 2n)²`.
pub fn choi_intermediate_map(g_t: Complex64, g_later: Complex64, paths: usize, pi_shifts: usize) -> Result<DMatrix<Complex64>> {
    if g_t.norm() < 1e-14 {
        return Err(Error::VanishingAmplitude(g_t.norm()));
    }
    let cfg = InterferometerConfig::binary(paths, pi_shifts)?;
    if cfg.is_null() {
        return Err(Error::NullOutcome { probability: 0.0 });
    }
    let n = paths as f64;
    let n_bar = n / (n - 2.0 * pi_shifts as f64).powi(2);
    let r = g_later / g_t;
    let mut m = DMatrix::zeros(4, 4);
    m[(0, 0)] = Complex64::new(1.0, 0.0);
    m[(0, 3)] = r.conj();
    m[(3, 0)] = r;
    m[(3, 3)] = Complex64::new(r.norm_sqr(), 0.0);
    m[(1, 1)] = Complex64::new(n_bar * (1.0 - r.norm_sqr()), 0.0);
    Ok(m)
}

/// Per-step CP-divisibility diagnostics for consecutive grid pairs.
#[derive(Debug, Clone)]
pub struct DivisibilityReport {
    /// Midpoints `t_k + dt/2` of the grid pairs.
    pub times: Vec<f64>,
    /// `d|G|²/dt` as the centred difference at each pair midpoint.
    pub derivative: Vec<f64>,
    pub derivative_ok: Vec<bool>,
    /// Minimum Choi eigenvalue; `None` where `|G(t_k)|` vanishes.
    pub choi_min_eigenvalue: Vec<Option<f64>>,
    pub choi_ok: Vec<Option<bool>>,
    pub tolerance: f64,
}

impl DivisibilityReport {
    pub fn divisible(&self) -> bool {
        self.derivative_ok.iter().all(|&ok| ok)
    }

    pub fn first_violation_time(&self) -> Option<f64> {
        self.derivative_ok.iter().position(|ok| !ok).map(|k| self.times[k])
    }

    /// Both criteria give the same verdict wherever the Choi map exists.
    pub fn criteria_agree(&self) -> bool {
        self.derivative_ok
            .iter()
            .zip(&self.choi_ok)
            .all(|(&d, c)| c.map_or(true, |c| c == d))
    }

    /// Number of grid pairs where both criteria were evaluated.
    pub fn compared_pairs(&self) -> usize {
        self.choi_ok.iter().filter(|c| c.is_some()).count()
    }
}

/// Evaluates both divisibility criteria on every consecutive grid pair.
///
/// `tolerance` bounds the allowed growth rate of `|G|²`; the Choi test uses
/// the same bound expressed in eigenvalue units, `-N̄ tol dt / |G(t_k)|²`.
/// Defaults to `1e-9 max|G|²`.
pub fn divisibility_report(amplitude: &DecayAmplitude, paths: usize, pi_shifts: usize, tolerance: Option<f64>) -> Result<DivisibilityReport> {
    let g = amplitude.values();
    if g.len() < 3 {
        return Err(invalid("amplitude", "need at least three samples"));
    }
    let cfg = InterferometerConfig::binary(paths, pi_shifts)?;
    if cfg.is_null() {
        return Err(Error::NullOutcome { probability: 0.0 });
    }
    let n = paths as f64;
    let n_bar = n / (n - 2.0 * pi_shifts as f64).powi(2);
    let survival = amplitude.survival();
    let tol = tolerance.unwrap_or_else(|| 1e-9 * survival.iter().copied().fold(0.0, f64::max));
    let dt = amplitude.grid().dt();
    let pairs = g.len() - 1;
    let mut report = DivisibilityReport {
        times: Vec::with_capacity(pairs),
        derivative: Vec::with_capacity(pairs),
        derivative_ok: Vec::with_capacity(pairs),
        choi_min_eigenvalue: Vec::with_capacity(pairs),
        choi_ok: Vec::with_capacity(pairs),
        tolerance: tol,
    };
    for k in 0..pairs {
        let d = (survival[k + 1] - survival[k]) / dt;
        report.times.push(amplitude.grid().time(k) + 0.5 * dt);
        report.derivative.push(d);
        report.derivative_ok.push(d <= tol);
        match choi_intermediate_map(g[k], g[k + 1], paths, pi_shifts) {
            Ok(m) => {
                let lmin = min_eigenvalue_hermitian(&m)?;
                let threshold = -n_bar * tol * dt / survival[k];
                report.choi_min_eigenvalue.push(Some(lmin));
                report.choi_ok.push(Some(lmin >= threshold));
            }
            Err(Error::VanishingAmplitude(_)) => {
                report.choi_min_eigenvalue.push(None);
                report.choi_ok.push(None);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

/// CP divisibility of the single-path map (the verdict is the same for
/// every non-null `(N, n)`) and the first violating time, if any.
pub fn is_cp_divisible(amplitude: &DecayAmplitude, tolerance: Option<f64>) -> Result<(bool, Option<f64>)> {
    let report = divisibility_report(amplitude, 1, 0, tolerance)?;
    if !report.criteria_agree() {
        return Err(Error::NonPhysical("derivative and Choi divisibility criteria disagree".into()));
    }
    Ok((report.divisible(), report.first_violation_time()))
}

/// Post-selected state normalized, with its success probability.
pub fn normalized_postselected_diss(c_e0: Complex64, c_g0: Complex64, g: Complex64, paths: usize, pi_shifts: usize) -> Result<(QubitState, f64)> {
    normalize(&postselected_state_diss(c_e0, c_g0, g, paths, pi_shifts)?)
}
