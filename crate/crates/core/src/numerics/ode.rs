use nalgebra::DMatrix;
use num_complex::Complex64;

use super::grid::TimeGrid;
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Classical fourth-order Runge-Kutta for `dρ/dt = rhs(ρ)` with a fixed step.
///
/// Returns the state at every grid point, starting with `rho0` itself.
pub fn integrate_matrix_ode<F>(rhs: F, rho0: &CMatrix, grid: &TimeGrid) -> Result<Vec<CMatrix>>
where
    F: Fn(&CMatrix) -> CMatrix,
{
    if !rho0.is_square() {
        return Err(Error::DimensionMismatch {
            expected: rho0.nrows(),
            found: rho0.ncols(),
        });
    }
    let dt = grid.dt();
    let mut out = Vec::with_capacity(grid.count());
    let mut rho = rho0.clone();
    out.push(rho.clone());
    for _ in 1..grid.count() {
        let k1 = rhs(&rho);
        if k1.shape() != rho.shape() {
            return Err(Error::DimensionMismatch {
                expected: rho.nrows(),
                found: k1.nrows(),
            });
        }
        let k2 = rhs(&(&rho + &k1 * Complex64::from(0.5 * dt)));
        let k3 = rhs(&(&rho + &k2 * Complex64::from(0.5 * dt)));
        let k4 = rhs(&(&rho + &k3 * Complex64::from(dt)));
        let incr = (k1 + (k2 + k3) * Complex64::from(2.0) + k4) * Complex64::from(dt / 6.0);
        rho += incr;
        out.push(rho.clone());
    }
    Ok(out)
}
