//! Memory-kernel amplitude equation `c'(t) = -∫_0^t f(t - τ) c(τ) dτ`.
//!
//! Discretised with product-trapezoidal weights for the memory integral and
//! the trapezoidal rule in time, which gives an implicit but scalar update:
//!
//! ```text
//! I_n     = dt [ f_n c_0 / 2 + Σ_{j=1}^{n-1} f_{n-j} c_j + f_0 c_n / 2 ]
//! c_{n+1} = c_n - dt/2 (I_n + I_{n+1})
//! ```

use num_complex::Complex64;

use super::grid::{ComplexSeries, TimeGrid};
use crate::error::{invalid, Result};

/// Solves the memory equation for a kernel already sampled at
/// `f(k * dt)`, `k = 0..grid.count()`.
pub fn solve_volterra_sampled(kernel: &[Complex64], grid: TimeGrid, c0: Complex64) -> Result<ComplexSeries> {
    if grid.t0() != 0.0 {
        return Err(invalid("grid", "memory equation grid must start at t = 0"));
    }
    let n_pts = grid.count();
    if kernel.len() < n_pts {
        return Err(crate::Error::DimensionMismatch {
            expected: n_pts,
            found: kernel.len(),
        });
    }
    let dt = grid.dt();
    let half_dt = 0.5 * dt;
    let implicit = Complex64::new(1.0, 0.0) + kernel[0] * (dt * dt * 0.25);

    let mut c = Vec::with_capacity(n_pts);
    c.push(c0);
    let mut memory = Complex64::new(0.0, 0.0);
    for n in 0..n_pts - 1 {
        // Explicit part of I_{n+1}: the terms not involving c_{n+1}.
        let mut partial = kernel[n + 1] * c0 * 0.5;
        for j in 1..=n {
            partial += kernel[n + 1 - j] * c[j];
        }
        partial *= dt;
        let next = (c[n] - (memory + partial) * half_dt) / implicit;
        memory = partial + kernel[0] * next * half_dt;
        c.push(next);
    }
    ComplexSeries::new(grid, c)
}

/// Solves the memory equation for a kernel given as a function of time.
pub fn solve_volterra<F>(kernel: F, grid: TimeGrid, c0: Complex64) -> Result<ComplexSeries>
where
    F: Fn(f64) -> Complex64,
{
    let samples: Vec<Complex64> = (0..grid.count()).map(|k| kernel(k as f64 * grid.dt())).collect();
    solve_volterra_sampled(&samples, grid, c0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn zero_kernel_keeps_amplitude() {
        let grid = TimeGrid::new(0.0, 0.01, 200).unwrap();
        let c0 = Complex64::new(0.3, -0.4);
        let s = solve_volterra(|_| Complex64::new(0.0, 0.0), grid, c0).unwrap();
        assert!(s.values().iter().all(|&c| c == c0));
    }

    #[test]
    fn constant_kernel_gives_cosine() {
        let grid = TimeGrid::from_zero(1.0, 1e-3).unwrap();
        let s = solve_volterra(|_| one(), grid, one()).unwrap();
        assert_eq!(s.values()[0], one());
        let last = *s.values().last().unwrap();
        assert!((last.re - 0.540_302_305_868_139_8).abs() < 1e-5, "{last}");
        assert!(last.im.abs() < 1e-14);
    }

    #[test]
    fn exponential_kernel_matches_pole_solution() {
        // f = e^{-t}/2 gives c(t) = e^{-t/2}[cos(t/2) + sin(t/2)].
        let grid = TimeGrid::from_zero(std::f64::consts::PI, 1e-3).unwrap();
        let s = solve_volterra(|t| Complex64::new(0.5 * (-t).exp(), 0.0), grid, one()).unwrap();
        let last = s.values().last().unwrap().re;
        assert!((last - (-std::f64::consts::FRAC_PI_2).exp()).abs() < 1e-5, "{last}");
    }

    #[test]
    fn rejects_grid_not_starting_at_zero() {
        let grid = TimeGrid::new(1.0, 0.1, 5).unwrap();
        assert!(solve_volterra(|_| one(), grid, one()).is_err());
    }
}
