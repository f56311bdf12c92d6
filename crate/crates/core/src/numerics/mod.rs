//! Numerical kernels shared by the physical models.

mod grid;
mod linalg;
mod ode;
mod quadrature;
mod roots;
mod volterra;

pub use grid::{ComplexSeries, TimeGrid};
pub use linalg::{eigenvalues_hermitian, hermitian_deviation, min_eigenvalue_hermitian, trace_norm_hermitian, HERMITIAN_TOL};
pub use ode::{integrate_matrix_ode, CMatrix};
pub use quadrature::{
    integrate_adaptive, integrate_adaptive_with_limit, integrate_half_line, GaussLegendre, QuadValue, Quadrature,
    DEFAULT_MAX_SUBDIVISIONS,
};
pub use roots::bisect;
pub use volterra::{solve_volterra, solve_volterra_sampled};
