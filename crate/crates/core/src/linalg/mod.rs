//! Sparse matrices, Krylov solvers and quadrature rules.

mod dense;
mod quadrature;
mod solve;
mod sparse;

pub use dense::solve_dense;
pub use quadrature::{gauss_legendre, quad_edge, quad_triangle, EdgeRule, TriangleRule};
pub use solve::{solve_general, solve_spd, SolverError};
pub use sparse::{CooMatrix, CsrMatrix};

/// Relative residual tolerance for the SPD recovery systems.
pub const RECOVERY_TOL: f64 = 1e-12;
/// Relative residual tolerance for the nonsymmetric SUPG system.
pub const SUPG_TOL: f64 = 1e-10;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
