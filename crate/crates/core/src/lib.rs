//! # layerfem
//!
//! Solvers for one-dimensional singularly perturbed two-point boundary value
//! problems
//!
//! ```text
//! -ε u'' + p(x) u' + q(x) u = f(x),   x ∈ [0, 1],   u(0) = λ,  u(1) = β
//! ```
//!
//! discretized with quadratic B-splines on geometrically graded meshes, where
//! successive element widths satisfy `h[m] = σ h[m-1]`. Two schemes are
//! provided:
//!
//! - [`galerkin`]: the B-splines serve as both trial and test functions,
//!   giving a pentadiagonal system.
//! - [`subdomain`]: one integral balance per element (piecewise constant test
//!   functions), giving a tridiagonal system solved with the Thomas algorithm.
//!
//! [`analysis`] measures knot errors, runs convergence studies and searches the
//! mesh ratio σ that minimizes the maximum error.
//!
//! ## Example
//!
//! ```rust
//! use layerfem::{analysis, problem, GradedMesh, Method, SolverOptions};
//!
//! let problem = problem::lorenz_example(0.5).unwrap();
//! let mesh = GradedMesh::new(0.0, 1.0, 64, 1.0).unwrap();
//! let solution = layerfem::solve(&problem, &mesh, Method::Galerkin, &SolverOptions::default()).unwrap();
//! let report = analysis::knot_error(&solution, &problem).unwrap();
//! assert!(report.linf < 1e-3);
//! ```

pub mod analysis;
pub mod basis;
mod error;
pub mod galerkin;
pub mod mesh;
pub mod numerics;
pub mod problem;
pub mod solution;
pub mod subdomain;

pub use basis::{CoefficientVector, LocalBasis};
pub use error::{Error, Result};
pub use mesh::GradedMesh;
pub use problem::{BvProblem, Coefficient};
pub use solution::{solve, Method, Solution, SolverOptions};
