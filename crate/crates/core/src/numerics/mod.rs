//! Quadrature and direct linear solvers.

mod banded;
mod dense;
mod quadrature;
mod tridiagonal;

pub use banded::{solve_banded, BandedMatrix, BandedSystem};
pub use dense::solve_dense_reference;
pub use quadrature::{gauss_legendre_rule, integrate_on_element, QuadratureRule};
pub use tridiagonal::{solve_tridiagonal, TridiagonalSystem};

/// Smallest pivot magnitude the elimination routines accept.
pub const PIVOT_FLOOR: f64 = 1e-300;
