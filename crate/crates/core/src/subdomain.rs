//! Subdomain Galerkin discretization: integrate the equation over each
//! element (test function = indicator of the element).
//!
//! With `u = Σ δ_j Q_j` the balance over `[x_m, x_{m+1}]`
//!
//! ```text
//! -ε [u']_{x_m}^{x_{m+1}} + p_m [u]_{x_m}^{x_{m+1}} + q_m ∫u = ∫f
//! ```
//!
//! couples only `δ_{m-1}, δ_m, δ_{m+1}`, so after eliminating `δ_{-1}` and
//! `δ_N` through the boundary conditions the system is tridiagonal.

use crate::basis::CoefficientVector;
use crate::galerkin::{finish, solve_failed};
use crate::numerics::{integrate_on_element, QuadratureRule, TridiagonalSystem};
use crate::{BvProblem, Error, GradedMesh, Method, Result, Solution};

/// Right-hand side of each element balance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LoadMode {
    /// `∫_{x_m}^{x_{m+1}} f dx`, consistent with the balance equation.
    #[default]
    Integral,
    /// `f(x_m)`, without the element width. Only useful for comparison.
    PointValue,
}

/// Where `p` and `q` are sampled on each element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoefficientSampling {
    #[default]
    LeftKnot,
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SubdomainOptions {
    pub load: LoadMode,
    pub sampling: CoefficientSampling,
}

/// Coefficients of `δ_{m-1}`, `δ_m`, `δ_{m+1}` in the balance of element `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubdomainRow {
    pub lower: f64,
    pub diag: f64,
    pub upper: f64,
    pub rhs: f64,
}

pub fn subdomain_row(
    problem: &BvProblem,
    mesh: &GradedMesh,
    m: usize,
    rule: &QuadratureRule,
    options: &SubdomainOptions,
) -> Result<SubdomainRow> {
    let (s, h, x0) = (mesh.ratio(), mesh.width(m), mesh.knot(m));
    let eps = problem.epsilon;
    let xs = match options.sampling {
        CoefficientSampling::LeftKnot => x0,
        CoefficientSampling::Midpoint => x0 + 0.5 * h,
    };
    let (p, q) = (problem.p.eval(xs), problem.q.eval(xs));
    for value in [p, q] {
        if !value.is_finite() {
            return Err(Error::NonFiniteIntegrand { node: xs - x0, value });
        }
    }
    let rhs = match options.load {
        LoadMode::Integral => integrate_on_element(rule, h, |xi| problem.f.eval(x0 + xi))?,
        LoadMode::PointValue => {
            let value = problem.f.eval(x0);
            if !value.is_finite() {
                return Err(Error::NonFiniteIntegrand { node: 0.0, value });
            }
            value
        }
    };
    Ok(SubdomainRow {
        lower: -2.0 * s * eps / h - s * p + s * h * q / 3.0,
        diag: 2.0 * eps / h * (1.0 + s) + (s - 1.0) * p + 2.0 * h * (1.0 + s) * q / 3.0,
        upper: -2.0 * eps / h + p + h * q / 3.0,
        rhs,
    })
}

/// `u'(x_{m+1}) - u'(x_m)` written in the coefficients of element `m`.
pub fn derivative_jump(mesh: &GradedMesh, deltas: &CoefficientVector, m: usize) -> f64 {
    let (s, h) = (mesh.ratio(), mesh.width(m));
    let next = s * h;
    let [prev, cur, following] = deltas.local(m);
    2.0 * s / next * following + (-2.0 * s / next - 2.0 * s / h) * cur + 2.0 * s / h * prev
}

/// `u(x_{m+1}) - u(x_m)` written in the coefficients of element `m`.
pub fn value_jump(mesh: &GradedMesh, deltas: &CoefficientVector, m: usize) -> f64 {
    let s = mesh.ratio();
    let [prev, cur, following] = deltas.local(m);
    following + (s - 1.0) * cur - s * prev
}

pub fn subdomain_rows(
    problem: &BvProblem,
    mesh: &GradedMesh,
    rule: &QuadratureRule,
    options: &SubdomainOptions,
) -> Result<Vec<SubdomainRow>> {
    (0..mesh.element_count())
        .map(|m| subdomain_row(problem, mesh, m, rule, options))
        .collect()
}

/// The `N × N` tridiagonal system in `δ_0 .. δ_{N-1}` after eliminating
/// `δ_{-1} = (λ - δ_0)/σ` and `δ_N = β - σ δ_{N-1}`.
pub fn assemble_subdomain(
    problem: &BvProblem,
    mesh: &GradedMesh,
    rule: &QuadratureRule,
    options: &SubdomainOptions,
) -> Result<TridiagonalSystem> {
    let rows = subdomain_rows(problem, mesh, rule, options)?;
    let n = rows.len();
    let s = mesh.ratio();
    let mut sys = TridiagonalSystem {
        sub: rows[1..].iter().map(|r| r.lower).collect(),
        diag: rows.iter().map(|r| r.diag).collect(),
        sup: rows[..n - 1].iter().map(|r| r.upper).collect(),
        rhs: rows.iter().map(|r| r.rhs).collect(),
    };
    let first = rows[0];
    sys.diag[0] -= first.lower / s;
    sys.rhs[0] -= first.lower * problem.lambda / s;
    let last = rows[n - 1];
    sys.diag[n - 1] -= s * last.upper;
    sys.rhs[n - 1] -= last.upper * problem.beta;
    Ok(sys)
}

pub fn solve_subdomain(
    problem: &BvProblem,
    mesh: &GradedMesh,
    rule: &QuadratureRule,
    options: &SubdomainOptions,
) -> Result<Solution> {
    let system = assemble_subdomain(problem, mesh, rule, options)?;
    let interior = system.solve().map_err(|e| match e {
        Error::ZeroPivot { row } | Error::Singular { row } => solve_failed(Method::Subdomain, problem, mesh, row),
        other => other,
    })?;
    finish(problem, mesh, &interior, Method::Subdomain)
}
