//! Second-order perturbative engine for general qubit couplings.
//!
//! Each path `i` couples through `Σ_α A_α ⊗ B_{i,α}` with bath correlation
//! functions `C_{αβ}(t1, t2) = ∫ dω J_i(ω) f_{αβ}(ω, t1, t2)`. With vanishing
//! first bath moments only the diagonal path blocks pick up a second-order
//! correction, and the post-selected decay factor becomes an average of `N`
//! overlap integrals with path-resolved filter functions.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::model::{hermitian_deviation2, phase_pair_sum, sigma_x, sigma_y, sigma_z, Op2, QubitState};
use crate::numerics::{integrate_adaptive_with_limit, GaussLegendre, QuadValue};
use crate::SpectralDensity;

/// `f_{αβ}(ω, t1, t2)` as a function of `(α, β, ω, t1, t2)`.
pub type CorrelationKernel = Arc<dyn Fn(usize, usize, f64, f64, f64) -> Complex64 + Send + Sync>;

const OMEGA_REL_TOL: f64 = 1e-10;
const OMEGA_MAX_SUBDIVISIONS: usize = 20_000;

/// Gauss-Legendre settings for the double time integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeQuadrature {
    pub order: usize,
    /// Panels per `2π` of accumulated phase.
    pub panels_per_cycle: f64,
    pub min_panels: usize,
}

impl Default for TimeQuadrature {
    fn default() -> Self {
        Self {
            order: 16,
            panels_per_cycle: 1.0,
            min_panels: 2,
        }
    }
}

/// Free qubit Hamiltonian, coupling operators, correlation kernel and
/// per-path spectral densities.
#[derive(Clone)]
pub struct CouplingModel {
    hamiltonian: Op2,
    operators: Vec<Op2>,
    kernel: CorrelationKernel,
    densities: Vec<SpectralDensity>,
    quadrature: TimeQuadrature,
}

impl fmt::Debug for CouplingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CouplingModel")
            .field("hamiltonian", &self.hamiltonian)
            .field("operators", &self.operators)
            .field("densities", &self.densities)
            .field("quadrature", &self.quadrature)
            .finish_non_exhaustive()
    }
}

impl CouplingModel {
    /// `first_moments_vanish` declares `tr[B_{i,α} ρ_E] = 0`; the engine
    /// does not treat the first-order terms otherwise.
    pub fn new(
        hamiltonian: Op2,
        operators: Vec<Op2>,
        kernel: CorrelationKernel,
        densities: Vec<SpectralDensity>,
        first_moments_vanish: bool,
    ) -> Result<Self> {
        if !first_moments_vanish {
            return Err(invalid("first_moments_vanish", "non-vanishing first bath moments are not supported"));
        }
        let dev = hermitian_deviation2(&hamiltonian);
        if dev > 1e-12 {
            return Err(Error::NotHermitian { deviation: dev });
        }
        if operators.is_empty() {
            return Err(invalid("operators", "need at least one coupling operator"));
        }
        for a in &operators {
            let dev = hermitian_deviation2(a);
            if dev > 1e-12 {
                return Err(Error::NotHermitian { deviation: dev });
            }
        }
        if densities.is_empty() {
            return Err(invalid("densities", "need one spectral density per path"));
        }
        Ok(Self {
            hamiltonian,
            operators,
            kernel,
            densities,
            quadrature: TimeQuadrature::default(),
        })
    }

    /// Single-excitation exchange coupling `σ₊ B + σ₋ B†` with a vacuum bath,
    /// written as `σx ⊗ B₁ + σy ⊗ B₂`.
    pub fn dissipative(omega_q: f64, densities: Vec<SpectralDensity>) -> Result<Self> {
        let c = [
            [Complex64::new(0.25, 0.0), Complex64::new(0.0, -0.25)],
            [Complex64::new(0.0, 0.25), Complex64::new(0.25, 0.0)],
        ];
        let kernel: CorrelationKernel = Arc::new(move |a, b, w, t1, t2| c[a][b] * Complex64::from_polar(1.0, -w * (t1 - t2)));
        Self::new(sigma_z() * Complex64::new(0.5 * omega_q, 0.0), vec![sigma_x(), sigma_y()], kernel, densities, true)
    }

    /// Pure dephasing `σz ⊗ (B + B†)` with a thermal bath at `temperature`.
    pub fn dephasing(omega_q: f64, densities: Vec<SpectralDensity>, temperature: f64) -> Result<Self> {
        if !(temperature >= 0.0 && temperature.is_finite()) {
            return Err(invalid("temperature", "must be finite and non-negative"));
        }
        let kernel: CorrelationKernel = Arc::new(move |_, _, w, t1, t2| {
            let x = w * (t1 - t2);
            let coth = if temperature == 0.0 { 1.0 } else { 1.0 / (w / (2.0 * temperature)).tanh() };
            Complex64::new(coth * x.cos(), -x.sin())
        });
        Self::new(sigma_z() * Complex64::new(0.5 * omega_q, 0.0), vec![sigma_z()], kernel, densities, true)
    }

    pub fn with_quadrature(mut self, quadrature: TimeQuadrature) -> Result<Self> {
        if quadrature.order == 0 || quadrature.min_panels == 0 || !(quadrature.panels_per_cycle > 0.0) {
            return Err(invalid("quadrature", "order, panel counts and density must be positive"));
        }
        self.quadrature = quadrature;
        Ok(self)
    }

    pub fn paths(&self) -> usize {
        self.densities.len()
    }

    pub fn density(&self, path: usize) -> &SpectralDensity {
        &self.densities[path]
    }

    pub fn operators(&self) -> &[Op2] {
        &self.operators
    }

    pub fn hamiltonian(&self) -> &Op2 {
        &self.hamiltonian
    }

    /// Largest Bohr frequency of `H_Q`.
    fn bohr_frequency(&self) -> f64 {
        let (lo, hi) = crate::model::eigenvalues2(&self.hamiltonian);
        hi - lo
    }

    fn panels(&self, omega: f64, t: f64) -> usize {
        let phase = (omega.abs() + self.bohr_frequency()) * t;
        let q = &self.quadrature;
        ((phase / (2.0 * std::f64::consts::PI) * q.panels_per_cycle).ceil() as usize).max(q.min_panels)
    }

    fn check_path(&self, path: usize) -> Result<()> {
        if path >= self.paths() {
            return Err(Error::DimensionMismatch { expected: self.paths(), found: path + 1 });
        }
        Ok(())
    }

    /// `∫_0^t dt1 ∫_0^{t1} dt2 g(t1, t2)` on composite Gauss-Legendre panels.
    fn triangle<T, G>(&self, t: f64, omega: f64, g: G) -> T
    where
        T: QuadValue,
        G: Fn(f64, f64) -> T,
    {
        let rule = GaussLegendre::new(self.quadrature.order);
        let panels = self.panels(omega, t);
        let mut acc = T::zero();
        for (t1, w1) in rule.composite(0.0, t, panels) {
            let inner = ((panels as f64 * t1 / t).ceil() as usize).max(1);
            let mut row = T::zero();
            for (t2, w2) in rule.composite(0.0, t1, inner) {
                row = row + g(t1, t2).scale(w2);
            }
            acc = acc + row.scale(w1);
        }
        acc
    }
}

/// `e^{iHt} A e^{-iHt}` via the Pauli decomposition of `H`.
pub fn interaction_picture_operator(a: &Op2, h: &Op2, t: f64) -> Op2 {
    let hx = 0.5 * (h * sigma_x()).trace().re;
    let hy = 0.5 * (h * sigma_y()).trace().re;
    let hz = 0.5 * (h * sigma_z()).trace().re;
    let norm = (hx * hx + hy * hy + hz * hz).sqrt();
    if norm == 0.0 || t == 0.0 {
        return *a;
    }
    let n_sigma = (sigma_x() * Complex64::new(hx, 0.0) + sigma_y() * Complex64::new(hy, 0.0) + sigma_z() * Complex64::new(hz, 0.0))
        / Complex64::new(norm, 0.0);
    let (s, c) = (norm * t).sin_cos();
    // The identity part of H only contributes a phase that cancels.
    let u = Op2::identity() * Complex64::new(c, 0.0) - n_sigma * Complex64::new(0.0, s);
    u.adjoint() * a * u
}

/// Second-order correction to the diagonal path block `ρ_{Q,i,i}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrderBlock {
    pub block: Op2,
    /// `‖block‖_tr`; the expansion is meaningful when this is small.
    pub trace_norm: f64,
}

impl SecondOrderBlock {
    pub fn is_perturbative(&self, threshold: f64) -> bool {
        self.trace_norm < threshold
    }

    pub fn trace_drift(&self) -> f64 {
        self.block.trace().norm()
    }
}

fn integrate_over<T, F>(density: &SpectralDensity, f: F, scale: f64) -> Result<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let mut cuts = vec![0.0];
    cuts.extend(density.breakpoints());
    cuts.push(density.omega_max());
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut total = T::zero();
    for w in cuts.windows(2) {
        let part = integrate_adaptive_with_limit(&f, w[0], w[1], OMEGA_REL_TOL, 1e-15 * scale, OMEGA_MAX_SUBDIVISIONS)?;
        total = total + part.value;
    }
    Ok(total)
}

/// `Σ_{αβ} ∫∫ {[A_β(t2) ρ0 A_α(t1) - A_α(t1) A_β(t2) ρ0] C_{αβ}(t1, t2) + h.c.}`
/// for path `path`, integrating frequency outermost.
pub fn second_order_block(model: &CouplingModel, rho0: &QubitState, path: usize, t: f64) -> Result<SecondOrderBlock> {
    model.check_path(path)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("t", "must be finite and non-negative"));
    }
    let density = model.density(path);
    if t == 0.0 || density.is_zero() {
        return Ok(SecondOrderBlock { block: Op2::zeros(), trace_norm: 0.0 });
    }
    let rho = *rho0.matrix();
    let h = model.hamiltonian;
    let ops = &model.operators;
    let per_omega = |w: f64| -> Op2 {
        let k = model.triangle(t, w, |t1, t2| {
            let mut acc = Op2::zeros();
            for (alpha, a) in ops.iter().enumerate() {
                let a1 = interaction_picture_operator(a, &h, t1);
                for (beta, b) in ops.iter().enumerate() {
                    let b2 = interaction_picture_operator(b, &h, t2);
                    let c = (model.kernel)(alpha, beta, w, t1, t2);
                    acc += (b2 * rho * a1 - a1 * b2 * rho) * c;
                }
            }
            acc
        });
        (k + k.adjoint()) * Complex64::new(density.eval(w), 0.0)
    };
    let scale = t * t * model.operators.len().pow(2) as f64 * density.scale();
    let block = integrate_over(density, per_omega, scale)?;
    let (l1, l2) = crate::model::eigenvalues2(&((block + block.adjoint()) * Complex64::new(0.5, 0.0)));
    Ok(SecondOrderBlock {
        block,
        trace_norm: l1.abs() + l2.abs(),
    })
}

/// `2N / Σ_{k,l} e^{-i(φ_k - φ_l)}`.
pub fn filter_prefactor(phases: &[f64]) -> Result<f64> {
    if phases.is_empty() || phases.iter().any(|p| !p.is_finite()) {
        return Err(invalid("phases", "need finite phases"));
    }
    let n = phases.len() as f64;
    let sum = phase_pair_sum(phases);
    if sum.re < 1e-12 * n * n {
        return Err(Error::NullOutcome { probability: sum.re / (n * n) });
    }
    Ok(2.0 * n / sum.re)
}

fn complement_projector(psi0: &QubitState) -> Result<Op2> {
    if !psi0.is_normalized() || (psi0.overlap(psi0) - 1.0).abs() > 1e-10 {
        return Err(invalid("psi0", "must be a normalized pure state"));
    }
    Ok(Op2::identity() - psi0.matrix())
}

fn filter_with_projector(model: &CouplingModel, projector: &Op2, rho: &Op2, omega: f64, t: f64) -> f64 {
    let h = model.hamiltonian;
    let ops = &model.operators;
    let v = model.triangle(t, omega, |t1, t2| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (alpha, a) in ops.iter().enumerate() {
            let a1 = interaction_picture_operator(a, &h, t1);
            for (beta, b) in ops.iter().enumerate() {
                let b2 = interaction_picture_operator(b, &h, t2);
                acc += (model.kernel)(alpha, beta, omega, t1, t2) * (projector * b2 * rho * a1).trace();
            }
        }
        acc
    });
    v.re
}

/// Path-resolved filter
/// `F_i = (2N/Σ e^{-i(φ_k-φ_l)}) Re Σ ∫∫ f_{αβ} tr[P_⊥ A_β(t2) ρ0 A_α(t1)]`.
pub fn general_filter(model: &CouplingModel, psi0: &QubitState, omega: f64, t: f64, phases: &[f64], path: usize) -> Result<f64> {
    model.check_path(path)?;
    if phases.len() != model.paths() {
        return Err(Error::DimensionMismatch { expected: model.paths(), found: phases.len() });
    }
    let prefactor = filter_prefactor(phases)?;
    let projector = complement_projector(psi0)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(prefactor * filter_with_projector(model, &projector, psi0.matrix(), omega, t))
}

/// `(1/N) Σ_i ∫ dω J_i(ω) F_i(ω)`.
pub fn general_decay_factor(model: &CouplingModel, psi0: &QubitState, t: f64, phases: &[f64]) -> Result<f64> {
    if phases.len() != model.paths() {
        return Err(Error::DimensionMismatch { expected: model.paths(), found: phases.len() });
    }
    let prefactor = filter_prefactor(phases)?;
    let projector = complement_projector(psi0)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let rho = *psi0.matrix();
    let mut total = 0.0;
    for density in &model.densities {
        if density.is_zero() {
            continue;
        }
        let f = |w: f64| density.eval(w) * filter_with_projector(model, &projector, &rho, w, t);
        total += integrate_over(density, f, t * t * density.scale())?;
    }
    Ok(prefactor * total / model.paths() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn interaction_picture_examples() {
        let h = sigma_z() * Complex64::new(0.5, 0.0);
        assert_eq!(interaction_picture_operator(&sigma_x(), &h, 0.0), sigma_x());
        let z = interaction_picture_operator(&sigma_z(), &h, 1.3);
        assert!((z - sigma_z()).norm() < 1e-15);
        for t in [0.4, 2.0, 7.5] {
            let x = interaction_picture_operator(&sigma_x(), &h, t);
            let expect = sigma_x() * Complex64::new(t.cos(), 0.0) - sigma_y() * Complex64::new(t.sin(), 0.0);
            assert!((x - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn binary_prefactor_identity() {
        for n_paths in 1..=10usize {
            for n in 0..=n_paths {
                let phases: Vec<f64> = (0..n_paths).map(|k| if k < n { PI } else { 0.0 }).collect();
                let sum = phase_pair_sum(&phases);
                assert_eq!(sum.re, (n_paths as f64 - 2.0 * n as f64).powi(2));
                assert_eq!(sum.im, 0.0);
                if 2 * n != n_paths {
                    let pre = filter_prefactor(&phases).unwrap();
                    assert!((pre - 2.0 * n_paths as f64 / (n_paths as f64 - 2.0 * n as f64).powi(2)).abs() < 1e-15);
                } else {
                    assert!(filter_prefactor(&phases).is_err());
                }
            }
        }
    }

    #[test]
    fn zero_correlation_gives_zero_block() {
        let model = CouplingModel::dissipative(1.0, vec![SpectralDensity::zero()]).unwrap();
        let b = second_order_block(&model, &QubitState::excited(), 0, 2.0).unwrap();
        assert_eq!(b.block, Op2::zeros());
        let kernel: CorrelationKernel = Arc::new(|_, _, _, _, _| Complex64::new(0.0, 0.0));
        let j = SpectralDensity::gaussian_peak(1.5, 0.2).unwrap();
        let model = CouplingModel::new(sigma_z(), vec![sigma_x()], kernel, vec![j], true).unwrap();
        let b = second_order_block(&model, &QubitState::plus(), 0, 2.0).unwrap();
        assert!(b.block.norm() < 1e-300);
    }

    #[test]
    fn rejects_bad_models() {
        let kernel: CorrelationKernel = Arc::new(|_, _, _, _, _| Complex64::new(1.0, 0.0));
        let j = SpectralDensity::zero();
        assert!(CouplingModel::new(sigma_z(), vec![sigma_x()], kernel.clone(), vec![j.clone()], false).is_err());
        assert!(CouplingModel::new(sigma_plus_op(), vec![sigma_x()], kernel, vec![j], true).is_err());
    }

    fn sigma_plus_op() -> Op2 {
        crate::model::sigma_plus()
    }
}
