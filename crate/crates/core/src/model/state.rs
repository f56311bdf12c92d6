use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Op2 = Matrix2<Complex64>;

/// Index of `|e⟩` in the qubit basis.
pub const EXCITED: usize = 0;
/// Index of `|g⟩` in the qubit basis.
pub const GROUND: usize = 1;

pub const STATE_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `σ_z = |e⟩⟨e| - |g⟩⟨g|`.
pub fn sigma_z() -> Op2 {
    Op2::new(c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.))
}

pub fn sigma_x() -> Op2 {
    Op2::new(c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.))
}

/// `σ_y = -i|e⟩⟨g| + i|g⟩⟨e|`.
pub fn sigma_y() -> Op2 {
    Op2::new(c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.))
}

/// `σ_+ = |e⟩⟨g|`.
pub fn sigma_plus() -> Op2 {
    Op2::new(c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.))
}

/// `σ_- = |g⟩⟨e|`.
pub fn sigma_minus() -> Op2 {
    Op2::new(c(0., 0.), c(0., 0.), c(1., 0.), c(0., 0.))
}

/// Largest entry of `|M - M†|`.
pub fn hermitian_deviation2(m: &Op2) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues `(λ_min, λ_max)` of the Hermitian part of a 2×2 matrix.
pub fn eigenvalues2(m: &Op2) -> (f64, f64) {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    (mean - radius, mean + radius)
}

/// Qubit density operator in the `{|e⟩, |g⟩}` basis, possibly unnormalized.
///
/// An unnormalized state is the output of a post-selection: its trace is the
/// success probability of the selected outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    matrix: Op2,
    normalized: bool,
}

impl QubitState {
    /// Validates Hermiticity, positivity and `0 ≤ tr ≤ 1` at [`STATE_TOL`].
    pub fn new(matrix: Op2) -> Result<Self> {
        let state = Self {
            matrix,
            normalized: false,
        };
        state.check(STATE_TOL)?;
        Ok(state)
    }

    /// As [`QubitState::new`] but additionally requires unit trace.
    pub fn normalized(matrix: Op2) -> Result<Self> {
        let mut state = Self::new(matrix)?;
        let tr = state.trace();
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::NonPhysical(format!("trace {tr} is not 1")));
        }
        state.normalized = true;
        Ok(state)
    }

    /// `|ψ⟩⟨ψ|` for `|ψ⟩ = c_e|e⟩ + c_g|g⟩`.
    pub fn pure(c_e: Complex64, c_g: Complex64) -> Result<Self> {
        let norm = c_e.norm_sqr() + c_g.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(crate::error::invalid("amplitudes", format!("|c_e|² + |c_g|² = {norm}, expected 1")));
        }
        let m = Op2::new(c_e * c_e.conj(), c_e * c_g.conj(), c_g * c_e.conj(), c_g * c_g.conj());
        Ok(Self {
            matrix: m,
            normalized: true,
        })
    }

    pub fn excited() -> Self {
        Self::pure(c(1., 0.), c(0., 0.)).expect("unit amplitude")
    }

    pub fn ground() -> Self {
        Self::pure(c(0., 0.), c(1., 0.)).expect("unit amplitude")
    }

    /// `(|e⟩ ± |g⟩)/√2`.
    pub fn plus() -> Self {
        let a = c(std::f64::consts::FRAC_1_SQRT_2, 0.);
        Self::pure(a, a).expect("unit amplitude")
    }

    pub fn minus() -> Self {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        Self::pure(c(a, 0.), c(-a, 0.)).expect("unit amplitude")
    }

    pub(crate) fn from_raw(matrix: Op2) -> Self {
        Self {
            matrix,
            normalized: false,
        }
    }

    pub fn zero() -> Self {
        Self::from_raw(Op2::zeros())
    }

    pub(crate) fn set_normalized(&mut self) {
        self.normalized = true;
    }

    pub fn matrix(&self) -> &Op2 {
        &self.matrix
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn excited_population(&self) -> f64 {
        self.matrix[(EXCITED, EXCITED)].re
    }

    pub fn ground_population(&self) -> f64 {
        self.matrix[(GROUND, GROUND)].re
    }

    /// `⟨e|ρ|g⟩`.
    pub fn coherence(&self) -> Complex64 {
        self.matrix[(EXCITED, GROUND)]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eigenvalues2(&self.matrix).0
    }

    /// Hermitian, PSD to `-psd_tol`, trace in `[0, 1 + psd_tol]`.
    pub fn check(&self, psd_tol: f64) -> Result<()> {
        if self.matrix.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonPhysical("non-finite matrix entry".into()));
        }
        let deviation = hermitian_deviation2(&self.matrix);
        if deviation > STATE_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let lmin = self.min_eigenvalue();
        if lmin < -psd_tol {
            return Err(Error::NonPhysical(format!("negative eigenvalue {lmin:e}")));
        }
        let tr = self.trace();
        if !(-psd_tol..=1.0 + psd_tol).contains(&tr) {
            return Err(Error::NonPhysical(format!("trace {tr} outside [0, 1]")));
        }
        Ok(())
    }

    /// `½‖ρ - σ‖₁`.
    pub fn trace_distance(&self, other: &QubitState) -> f64 {
        let (lo, hi) = eigenvalues2(&(self.matrix - other.matrix));
        0.5 * (lo.abs() + hi.abs())
    }

    /// `⟨ψ|ρ|ψ⟩` for a pure reference state.
    pub fn overlap(&self, pure: &QubitState) -> f64 {
        (pure.matrix * self.matrix).trace().re
    }

    pub fn to_dmatrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_iterator(2, 2, self.matrix.iter().copied())
    }
}

/// `N × N` array of 2×2 path blocks `ρ_{Q,i,j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathBlockMatrix {
    paths: usize,
    blocks: Vec<Op2>,
}

impl PathBlockMatrix {
    /// Row-major blocks; requires `block(j, i) = block(i, j)†` and PSD
    /// diagonal blocks.
    pub fn new(paths: usize, blocks: Vec<Op2>) -> Result<Self> {
        if paths == 0 || blocks.len() != paths * paths {
            return Err(Error::DimensionMismatch {
                expected: paths * paths,
                found: blocks.len(),
            });
        }
        for i in 0..paths {
            for j in i..paths {
                let d = (blocks[i * paths + j] - blocks[j * paths + i].adjoint())
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max);
                if d > STATE_TOL {
                    return Err(Error::NotHermitian { deviation: d });
                }
            }
            QubitState::new(blocks[i * paths + i])?;
        }
        Ok(Self { paths, blocks })
    }

    /// Identical single-path dynamics `ρ` on the diagonal and a common
    /// interference block `β` off the diagonal.
    pub fn uniform(paths: usize, diagonal: &QubitState, off_diagonal: &QubitState) -> Result<Self> {
        let blocks = (0..paths * paths)
            .map(|k| if k / paths == k % paths { diagonal.matrix } else { off_diagonal.matrix })
            .collect();
        Self::new(paths, blocks)
    }

    pub fn paths(&self) -> usize {
        self.paths
    }

    pub fn block(&self, i: usize, j: usize) -> &Op2 {
        &self.blocks[i * self.paths + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_states_are_valid() {
        for s in [QubitState::excited(), QubitState::ground(), QubitState::plus(), QubitState::minus()] {
            s.check(1e-14).unwrap();
            assert!((s.trace() - 1.0).abs() < 1e-15);
            assert!(s.min_eigenvalue().abs() < 1e-15);
        }
        assert!((QubitState::plus().trace_distance(&QubitState::minus()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_unphysical_matrices() {
        let m = Op2::new(c(0.5, 0.), c(0.6, 0.), c(0.6, 0.), c(0.5, 0.));
        assert!(QubitState::new(m).is_err());
        let m = Op2::new(c(0.5, 0.), c(0.1, 0.), c(0.2, 0.), c(0.5, 0.));
        assert!(matches!(QubitState::new(m), Err(Error::NotHermitian { .. })));
        let m = Op2::new(c(0.7, 0.), c(0., 0.), c(0., 0.), c(0.7, 0.));
        assert!(QubitState::new(m).is_err());
        assert!(QubitState::pure(c(1., 0.), c(1., 0.)).is_err());
    }

    #[test]
    fn block_matrix_checks_adjoint_pairs() {
        let e = QubitState::excited();
        let ok = PathBlockMatrix::uniform(3, &e, &e).unwrap();
        assert_eq!(ok.paths(), 3);
        let mut blocks = vec![*e.matrix(); 4];
        blocks[1] = sigma_plus();
        assert!(PathBlockMatrix::new(2, blocks).is_err());
    }

    #[test]
    fn pauli_algebra() {
        let i = c(0., 1.);
        assert!((sigma_x() * sigma_y() - sigma_z() * i).norm() < 1e-15);
        assert!((sigma_plus() + sigma_minus() - sigma_x()).norm() < 1e-15);
    }
}
