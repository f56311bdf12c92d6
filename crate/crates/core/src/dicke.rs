//! Qubit with a coherently controlled position.
//!
//! The control register `C` selects one of `N` emitter sites. The joint
//! control-qubit state lives on span{|i⟩ ⊗ |e/g⟩} (index `2i + q`, `q = 0`
//! for `|e⟩`) and decays under a collective master equation whose cross
//! terms are weighted by `sinc(q|r_i - r_j|)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{r_factor, InterferometerConfig, Op2, QubitState, NULL_TRACE};
use crate::numerics::{bisect, eigenvalues_hermitian, integrate_matrix_ode, CMatrix, TimeGrid};
use crate::sinc;

/// First local minimum of sinc, `x = tan x ≈ 4.4934`.
pub const SINC_FIRST_MIN_ARG: f64 = 4.493_409_457_909_064;
/// Smallest value sinc attains.
pub const SINC_MIN: f64 = -0.217_233_628_211_221_6;

/// Default RK4 step in units of `1/Γ0`.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Super- and subradiant two-atom rates `Γ0[1 ± sinc(qd)]`.
pub fn dicke_rates_two_atom(gamma0: f64, qd: f64) -> Result<(f64, f64)> {
    if !(gamma0 > 0.0 && gamma0.is_finite()) {
        return Err(invalid("gamma0", "must be positive"));
    }
    let s = sinc(qd);
    Ok((gamma0 * (1.0 + s), gamma0 * (1.0 - s)))
}

/// Smallest `x ≥ 0` with `sinc(x) = s`.
pub fn collective_factor_argument(s: f64) -> Result<f64> {
    if !(SINC_MIN..=1.0).contains(&s) {
        return Err(invalid("collective_factor", format!("{s} outside [{SINC_MIN}, 1]")));
    }
    if s == 1.0 {
        return Ok(0.0);
    }
    bisect(|x| sinc(x) - s, 0.0, SINC_FIRST_MIN_ARG, 1e-16)
}

/// Emitter sites and the wavenumber `q = ωq/c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    distances: Vec<Vec<f64>>,
    q: f64,
}

impl Geometry {
    pub fn from_positions(positions: &[[f64; 3]], q: f64) -> Result<Self> {
        let d = positions
            .iter()
            .map(|a| {
                positions
                    .iter()
                    .map(|b| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt())
                    .collect()
            })
            .collect();
        Self::from_distances(d, q)
    }

    pub fn from_distances(distances: Vec<Vec<f64>>, q: f64) -> Result<Self> {
        let n = distances.len();
        if n == 0 {
            return Err(invalid("geometry", "needs at least one site"));
        }
        if !q.is_finite() || q < 0.0 {
            return Err(invalid("q", "must be finite and non-negative"));
        }
        for (i, row) in distances.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            if row[i] != 0.0 {
                return Err(invalid("distances", "diagonal must be zero"));
            }
            for (j, &d) in row.iter().enumerate() {
                if !(d >= 0.0 && d.is_finite()) || d != distances[j][i] {
                    return Err(invalid("distances", format!("entry ({i}, {j}) must be symmetric and non-negative")));
                }
            }
        }
        Ok(Self { distances, q })
    }

    /// Equal pairwise distance `d`: a point, segment, triangle or tetrahedron.
    pub fn regular(sites: usize, d: f64, q: f64) -> Result<Self> {
        let positions: Vec<[f64; 3]> = match sites {
            1 => vec![[0.0; 3]],
            2 => vec![[0.0; 3], [d, 0.0, 0.0]],
            3 => vec![[0.0; 3], [d, 0.0, 0.0], [0.5 * d, 0.5 * 3f64.sqrt() * d, 0.0]],
            4 => {
                let a = d / (2.0 * 2f64.sqrt());
                vec![[a, a, a], [a, -a, -a], [-a, a, -a], [-a, -a, a]]
            }
            _ => return Err(invalid("sites", "regular geometries exist for 1 to 4 sites")),
        };
        Self::from_positions(&positions, q)
    }

    /// Regular geometry with `q = 1` and spacing chosen so that
    /// `sinc(q d) = s`.
    pub fn regular_with_factor(sites: usize, s: f64) -> Result<Self> {
        Self::regular(sites, collective_factor_argument(s)?, 1.0)
    }

    pub fn sites(&self) -> usize {
        self.distances.len()
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distances[i][j]
    }

    pub fn rate_matrix(&self) -> CollectiveRateMatrix {
        let n = self.sites();
        CollectiveRateMatrix {
            matrix: DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { sinc(self.q * self.distances[i][j]) }),
        }
    }
}

/// `M_ii = 1`, `M_ij = sinc(q d_ij)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveRateMatrix {
    matrix: DMatrix<f64>,
}

impl CollectiveRateMatrix {
    /// Every off-diagonal entry equal to `s`.
    pub fn uniform(sites: usize, s: f64) -> Result<Self> {
        if sites == 0 {
            return Err(invalid("sites", "must be positive"));
        }
        if !(SINC_MIN..=1.0).contains(&s) {
            return Err(invalid("collective_factor", format!("{s} outside [{SINC_MIN}, 1]")));
        }
        Ok(Self {
            matrix: DMatrix::from_fn(sites, sites, |i, j| if i == j { 1.0 } else { s }),
        })
    }

    pub fn sites(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix.clone().symmetric_eigenvalues().min()
    }
}

/// Joint control-qubit density matrix of size `2N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlQubitState {
    matrix: CMatrix,
}

impl ControlQubitState {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() % 2 != 0 || matrix.nrows() == 0 {
            return Err(invalid("state", "must be a square matrix of even size"));
        }
        let eig = eigenvalues_hermitian(&matrix)?;
        if eig[0] < -1e-10 {
            return Err(Error::NonPhysical(format!("minimum eigenvalue {}", eig[0])));
        }
        Ok(Self { matrix })
    }

    /// `|χ_C⟩⟨χ_C| ⊗ |e⟩⟨e|` with the uniform control superposition.
    pub fn uniform_excited(sites: usize) -> Result<Self> {
        if sites == 0 {
            return Err(invalid("sites", "must be positive"));
        }
        let w = Complex64::new(1.0 / sites as f64, 0.0);
        let mut m = CMatrix::zeros(2 * sites, 2 * sites);
        for i in 0..sites {
            for j in 0..sites {
                m[(2 * i, 2 * j)] = w;
            }
        }
        Ok(Self { matrix: m })
    }

    pub fn sites(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Qubit block `⟨i|ρ|j⟩`.
    pub fn block(&self, i: usize, j: usize) -> Op2 {
        Op2::new(
            self.matrix[(2 * i, 2 * j)],
            self.matrix[(2 * i, 2 * j + 1)],
            self.matrix[(2 * i + 1, 2 * j)],
            self.matrix[(2 * i + 1, 2 * j + 1)],
        )
    }

    /// Unnormalized qubit state after projecting the control onto
    /// `(1/√N) Σ_k e^{iφ_k}|k⟩`.
    pub fn postselect(&self, phases: &[f64]) -> Result<QubitState> {
        let n = self.sites();
        if phases.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: phases.len() });
        }
        let mut acc = Op2::zeros();
        for (i, &pi) in phases.iter().enumerate() {
            for (j, &pj) in phases.iter().enumerate() {
                acc += self.block(i, j) * Complex64::from_polar(1.0 / n as f64, -(pi - pj));
            }
        }
        QubitState::new((acc + acc.adjoint()).map(|z| z * 0.5))
    }
}

/// Linear generator `ρ ↦ Γ0 Σ_i (L_i ρ L_i† - ½{L_i†L_i, ρ}) + Γ0 Σ_{i≠j} M_ij L_i ρ L_j†`
/// with `L_i = |i⟩⟨i| ⊗ σ₋`, stored as a superoperator on column-major vec(ρ).
#[derive(Debug, Clone)]
pub struct MasterGenerator {
    dim: usize,
    superop: CMatrix,
}

fn jump_operator(sites: usize, i: usize) -> CMatrix {
    let mut l = CMatrix::zeros(2 * sites, 2 * sites);
    // σ₋ = |g⟩⟨e|
    l[(2 * i + 1, 2 * i)] = Complex64::new(1.0, 0.0);
    l
}

fn apply_verbatim(jumps: &[CMatrix], rates: &CollectiveRateMatrix, gamma0: f64, rho: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(rho.nrows(), rho.ncols());
    for (i, li) in jumps.iter().enumerate() {
        let li_dag = li.adjoint();
        let number = &li_dag * li;
        out += li * rho * &li_dag - (&number * rho + rho * &number) * Complex64::new(0.5, 0.0);
        for (j, lj) in jumps.iter().enumerate() {
            if i != j {
                out += li * rho * lj.adjoint() * Complex64::new(rates.entry(i, j), 0.0);
            }
        }
    }
    out * Complex64::new(gamma0, 0.0)
}

/// Builds the collective generator and checks that it preserves trace on
/// every matrix unit `|a⟩⟨b|`.
pub fn build_master_generator(rates: &CollectiveRateMatrix, gamma0: f64, sites: usize) -> Result<MasterGenerator> {
    if rates.sites() != sites {
        return Err(Error::DimensionMismatch { expected: sites, found: rates.sites() });
    }
    if !(gamma0 > 0.0 && gamma0.is_finite()) {
        return Err(invalid("gamma0", "must be positive"));
    }
    let dim = 2 * sites;
    let jumps: Vec<CMatrix> = (0..sites).map(|i| jump_operator(sites, i)).collect();
    let mut superop = CMatrix::zeros(dim * dim, dim * dim);
    let mut unit = CMatrix::zeros(dim, dim);
    for b in 0..dim {
        for a in 0..dim {
            unit[(a, b)] = Complex64::new(1.0, 0.0);
            let image = apply_verbatim(&jumps, rates, gamma0, &unit);
            let drift = image.trace().norm();
            if drift > 1e-12 * gamma0 {
                return Err(Error::TraceNotPreserved { deviation: drift });
            }
            superop.set_column(a + b * dim, &DMatrix::from_column_slice(dim * dim, 1, image.as_slice()).column(0));
            unit[(a, b)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok(MasterGenerator { dim, superop })
}

impl MasterGenerator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let v = &self.superop * DMatrix::from_column_slice(self.dim * self.dim, 1, rho.as_slice());
        CMatrix::from_column_slice(self.dim, self.dim, v.as_slice())
    }

    /// RK4 evolution from `rho0` over `grid`.
    pub fn evolve(&self, rho0: &ControlQubitState, grid: &TimeGrid) -> Result<Vec<ControlQubitState>> {
        if rho0.matrix.nrows() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rho0.matrix.nrows() });
        }
        let series = integrate_matrix_ode(|r| self.apply(r), &rho0.matrix, grid)?;
        Ok(series.into_iter().map(|matrix| ControlQubitState { matrix }).collect())
    }
}

/// Post-selected excited population at every state of an evolution.
pub fn excited_population_numeric(series: &[ControlQubitState], paths: usize, pi_shifts: usize) -> Result<Vec<f64>> {
    let cfg = InterferometerConfig::binary(paths, pi_shifts)?;
    let phases = cfg.phase_vector();
    series
        .iter()
        .map(|rho| {
            let q = rho.postselect(&phases)?;
            let p = q.trace();
            if p < NULL_TRACE {
                return Err(Error::NullOutcome { probability: p });
            }
            Ok(q.excited_population() / p)
        })
        .collect()
}

/// Closed-form post-selected excited population for equal pairwise
/// collective factor `s`:
/// `R e^{-Γ0 t} / [1/N + (R - 1/N)(e^{-Γ0 t} + s(1 - e^{-Γ0 t}))]`.
pub fn excited_population_analytic(t: f64, paths: usize, pi_shifts: usize, gamma0: f64, s: f64) -> Result<f64> {
    if InterferometerConfig::binary(paths, pi_shifts)?.is_null() {
        return Err(Error::NullOutcome { probability: 0.0 });
    }
    if !(gamma0 > 0.0 && gamma0.is_finite()) {
        return Err(invalid("gamma0", "must be positive"));
    }
    if !(t >= 0.0) {
        return Err(invalid("t", "must be non-negative"));
    }
    let r = r_factor(paths, pi_shifts);
    let inv_n = 1.0 / paths as f64;
    let decay = (-gamma0 * t).exp();
    let den = inv_n + (r - inv_n) * (decay + s * (1.0 - decay));
    if !(den > NULL_TRACE) {
        return Err(Error::NullOutcome { probability: den });
    }
    Ok(r * decay / den)
}

/// Post-selected excited population from the master equation on an
/// equal-distance geometry with collective factor `s`, sampled on
/// `Γ0 t ∈ [0, gamma0_t_max]` with step `dt_scaled / Γ0`.
#[derive(Debug, Clone)]
pub struct DickeRun {
    pub times: Vec<f64>,
    pub states: Vec<ControlQubitState>,
    pub excited_population: Vec<f64>,
}

pub fn simulate_regular(paths: usize, pi_shifts: usize, gamma0: f64, s: f64, gamma0_t_max: f64, dt_scaled: f64) -> Result<DickeRun> {
    let geometry = Geometry::regular_with_factor(paths, s)?;
    simulate(&geometry, paths, pi_shifts, gamma0, gamma0_t_max, dt_scaled)
}

pub fn simulate(geometry: &Geometry, paths: usize, pi_shifts: usize, gamma0: f64, gamma0_t_max: f64, dt_scaled: f64) -> Result<DickeRun> {
    let generator = build_master_generator(&geometry.rate_matrix(), gamma0, paths)?;
    let grid = TimeGrid::from_zero(gamma0_t_max / gamma0, dt_scaled / gamma0)?;
    let states = generator.evolve(&ControlQubitState::uniform_excited(paths)?, &grid)?;
    let excited_population = excited_population_numeric(&states, paths, pi_shifts)?;
    Ok(DickeRun {
        times: grid.times().collect(),
        states,
        excited_population,
    })
}
