use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Largest allowed `|M - M†|` entry, relative to `max(1, max |M_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Maximum elementwise deviation `|M_ij - conj(M_ji)|`.
pub fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

fn symmetrized(m: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let deviation = hermitian_deviation(m);
    if deviation > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { deviation });
    }
    Ok((m + m.adjoint()) * Complex64::from(0.5))
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn eigenvalues_hermitian(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let sym = symmetrized(m)?;
    let mut values: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Smallest eigenvalue of a small Hermitian matrix (`n <= 8`).
pub fn min_eigenvalue_hermitian(m: &DMatrix<Complex64>) -> Result<f64> {
    if m.nrows() > 8 {
        return Err(invalid("matrix", format!("dimension {} exceeds 8", m.nrows())));
    }
    if m.nrows() == 0 {
        return Err(invalid("matrix", "empty matrix"));
    }
    Ok(eigenvalues_hermitian(m)?[0])
}

/// Trace norm `Σ|λ_i|` of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &DMatrix<Complex64>) -> Result<f64> {
    Ok(eigenvalues_hermitian(m)?.iter().map(|l| l.abs()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: usize, data: &[f64]) -> DMatrix<Complex64> {
        DMatrix::from_row_iterator(rows, rows, data.iter().map(|&x| Complex64::new(x, 0.0)))
    }

    #[test]
    fn diagonal_and_pauli_x() {
        let d = real(4, &[1., 0., 0., 0., 0., 2., 0., 0., 0., 0., 3., 0., 0., 0., 0., 4.]);
        assert!((min_eigenvalue_hermitian(&d).unwrap() - 1.0).abs() < 1e-14);
        let x = real(2, &[0., 1., 1., 0.]);
        assert!((min_eigenvalue_hermitian(&x).unwrap() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = real(2, &[0., 1., 0., 0.]);
        assert!(matches!(min_eigenvalue_hermitian(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn rejects_large_and_rectangular() {
        assert!(min_eigenvalue_hermitian(&DMatrix::<Complex64>::identity(9, 9)).is_err());
        assert!(min_eigenvalue_hermitian(&DMatrix::<Complex64>::zeros(2, 3)).is_err());
    }

    #[test]
    fn complex_hermitian() {
        // sigma_y has eigenvalues ±1.
        let y = DMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(0., 0.), Complex64::new(0., -1.), Complex64::new(0., 1.), Complex64::new(0., 0.)],
        );
        assert!((min_eigenvalue_hermitian(&y).unwrap() + 1.0).abs() < 1e-14);
        assert!((trace_norm_hermitian(&y).unwrap() - 2.0).abs() < 1e-14);
    }
}
