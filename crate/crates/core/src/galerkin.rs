//! Quadratic B-spline Galerkin discretization.
//!
//! Testing the equation against every spline `Q_i` and integrating the
//! diffusion term by parts gives, element by element,
//!
//! ```text
//! Σ_j [ ε ∫Q_i'Q_j' + ∫p Q_i Q_j' + ∫q Q_i Q_j ] δ_j - ε [Q_i Q_j']_0^h δ_j = ∫Q_i f
//! ```
//!
//! Local indices `0, 1, 2` refer to `(Q_{m-1}, Q_m, Q_{m+1})` on element `m`,
//! global row/column `i` to `Q_{i-1}`, so the assembled system has `N + 2`
//! rows and five diagonals. Dirichlet data is imposed through
//! `u(0) = σ δ_{-1} + δ_0` and `u(1) = σ δ_{N-1} + δ_N`.

use rayon::prelude::*;

use crate::basis::{local_basis, CoefficientVector};
use crate::numerics::{BandedMatrix, BandedSystem, QuadratureRule};
use crate::{BvProblem, Error, GradedMesh, Method, Result, Solution};

pub type Mat3 = [[f64; 3]; 3];

/// Element integrals in local `(m-1, m, m+1)` order, row = test, column = trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementMatrices {
    /// `∫ Q_i' Q_j'`
    pub stiffness: Mat3,
    /// `∫ p Q_i Q_j'`
    pub convection: Mat3,
    /// `∫ q Q_i Q_j`
    pub mass: Mat3,
    /// `Q_i Q_j' |_0^h`
    pub boundary: Mat3,
    /// `∫ Q_i f`
    pub load: [f64; 3],
}

fn integrate<P, Q, F>(
    ratio: f64,
    width: f64,
    rule: &QuadratureRule,
    p: P,
    q: Q,
    f: F,
) -> Result<ElementMatrices>
where
    P: Fn(f64) -> f64,
    Q: Fn(f64) -> f64,
    F: Fn(f64) -> f64,
{
    let mut out = ElementMatrices {
        stiffness: [[0.0; 3]; 3],
        convection: [[0.0; 3]; 3],
        mass: [[0.0; 3]; 3],
        boundary: element_boundary_matrix(ratio, width),
        load: [0.0; 3],
    };
    for (t, w) in rule.iter() {
        let xi = width * t;
        let (pv, qv, fv) = (p(xi), q(xi), f(xi));
        for value in [pv, qv, fv] {
            if !value.is_finite() {
                return Err(Error::NonFiniteIntegrand { node: xi, value });
            }
        }
        let basis = local_basis(ratio, width, xi);
        let (v, d) = (basis.values, basis.derivatives);
        let wh = w * width;
        for i in 0..3 {
            for j in 0..3 {
                out.stiffness[i][j] += wh * d[i] * d[j];
                out.convection[i][j] += wh * pv * v[i] * d[j];
                out.mass[i][j] += wh * qv * v[i] * v[j];
            }
            out.load[i] += wh * fv * v[i];
        }
    }
    Ok(out)
}

/// Element matrices of element `m` with the problem's `p`, `q`, `f` inside the
/// quadrature.
pub fn element_matrices(
    problem: &BvProblem,
    mesh: &GradedMesh,
    m: usize,
    rule: &QuadratureRule,
) -> Result<ElementMatrices> {
    let x0 = mesh.knot(m);
    integrate(
        mesh.ratio(),
        mesh.width(m),
        rule,
        |xi| problem.p.eval(x0 + xi),
        |xi| problem.q.eval(x0 + xi),
        |xi| problem.f.eval(x0 + xi),
    )
}

/// Pure basis integrals (`p = q = 1`, `f = 0`) for a single element.
pub fn unit_element_matrices(ratio: f64, width: f64, rule: &QuadratureRule) -> ElementMatrices {
    integrate(ratio, width, rule, |_| 1.0, |_| 1.0, |_| 0.0)
        .expect("constant coefficients are finite")
}

/// `Q_i(h) Q_j'(h) - Q_i(0) Q_j'(0)` evaluated directly from the basis.
pub fn element_boundary_matrix(ratio: f64, width: f64) -> Mat3 {
    let right = local_basis(ratio, width, width);
    let left = local_basis(ratio, width, 0.0);
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = right.values[i] * right.derivatives[j] - left.values[i] * left.derivatives[j];
        }
    }
    r
}

/// Closed-form load `∫ Q_i e^{x_m + ξ} dξ` for `f = eˣ`.
///
/// ```text
/// ϑ1 = -σ (2h - 2eʰ + h² + 2)
/// ϑ2 = 2(σ + 1)(1 - eʰ) + 2h(σ + eʰ) - h²(1 - σ eʰ)
/// ϑ3 = eʰ(h² - 2h + 2) - 2
/// ```
///
/// scaled by `e^{x_m} / h²`. Loses accuracy to cancellation for small `h`.
pub fn closed_form_load_expx(ratio: f64, width: f64, x_m: f64) -> [f64; 3] {
    let (s, h) = (ratio, width);
    let eh = h.exp();
    let t1 = -s * (2.0 * h - 2.0 * eh + h * h + 2.0);
    let t2 = 2.0 * (s + 1.0) * (1.0 - eh) + 2.0 * h * (s + eh) - h * h * (1.0 - s * eh);
    let t3 = eh * (h * h - 2.0 * h + 2.0) - 2.0;
    let scale = x_m.exp() / (h * h);
    [scale * t1, scale * t2, scale * t3]
}

/// Closed forms of the element matrices as they are usually tabulated for
/// this basis, kept as fixtures. Several entries are known to be wrong:
///
/// - stiffness `(0,1)` and `(1,0)` read `σ(1-σ)`; direct integration gives
///   `σ(1-2σ)` (the tabulated rows do not sum to zero).
/// - mass `(0,0)`, `(0,1)`, `(1,0)` and `(2,2)` carry an extra factor `h`,
///   and `(1,1)` has `11σ/5` where integration gives `11σ/15`.
/// - boundary `(0,1)`, `(1,0)` and the whole last row differ from direct
///   evaluation.
pub mod tabulated {
    use super::Mat3;

    pub fn stiffness(s: f64, h: f64) -> Mat3 {
        let c = 2.0 / (3.0 * h);
        [
            [c * 2.0 * s * s, c * s * (1.0 - s), -c * s],
            [c * s * (1.0 - s), c * 2.0 * (1.0 - s + s * s), c * (s - 2.0)],
            [-c * s, c * (s - 2.0), c * 2.0],
        ]
    }

    pub fn convection(s: f64) -> Mat3 {
        [
            [-s * s / 2.0, s * (3.0 * s - 1.0) / 6.0, s / 6.0],
            [-s * (3.0 * s + 5.0) / 6.0, 0.5 * s * s - 0.5, 5.0 * s / 6.0 + 0.5],
            [-s / 6.0, s / 6.0 - 0.5, 0.5],
        ]
    }

    pub fn mass(s: f64, h: f64) -> Mat3 {
        let m01 = s * h * (4.0 * s + 9.0) / 30.0;
        let m12 = 0.3 * s + 2.0 / 15.0;
        [
            [h * s * s * h / 5.0, h * m01, h * s / 30.0],
            [h * m01, h * (8.0 / 15.0 * s * s + 2.2 * s + 8.0 / 15.0), h * m12],
            [h * s / 30.0, h * m12, h * h / 5.0],
        ]
    }

    pub fn boundary(s: f64, h: f64) -> Mat3 {
        [
            [2.0 * s * s / h, 0.0, 0.0],
            [2.0 * s * (3.0 * s + 2.0) / h, -4.0 * s / h, 2.0 * s / h],
            [0.0, 0.0, 0.0],
        ]
    }
}

/// Sum of the per-element boundary matrices over the whole mesh.
///
/// Interior contributions cancel because the splines and their derivatives
/// are continuous, so this equals [`boundary_matrix`] up to rounding.
pub fn accumulated_boundary_matrix(mesh: &GradedMesh) -> BandedMatrix {
    let n = mesh.element_count();
    let mut r = BandedMatrix::zeros(n + 2, 2, 2);
    for m in 0..n {
        let local = element_boundary_matrix(mesh.ratio(), mesh.width(m));
        for i in 0..3 {
            for j in 0..3 {
                r.add(m + i, m + j, local[i][j]);
            }
        }
    }
    r
}

/// `Q_i(b) Q_j'(b) - Q_i(a) Q_j'(a)`: only the two splines alive at each end
/// contribute.
pub fn boundary_matrix(mesh: &GradedMesh) -> BandedMatrix {
    let n = mesh.element_count();
    let s = mesh.ratio();
    let mut r = BandedMatrix::zeros(n + 2, 2, 2);
    let left = local_basis(s, mesh.width(0), 0.0);
    let right = local_basis(s, mesh.width(n - 1), mesh.width(n - 1));
    for i in 0..3 {
        for j in 0..3 {
            r.add(i, j, -left.values[i] * left.derivatives[j]);
            r.add(n - 1 + i, n - 1 + j, right.values[i] * right.derivatives[j]);
        }
    }
    r
}

/// Global `(N + 2) × (N + 2)` system before boundary conditions.
pub fn assemble_galerkin(
    problem: &BvProblem,
    mesh: &GradedMesh,
    rule: &QuadratureRule,
) -> Result<BandedSystem> {
    let n = mesh.element_count();
    let eps = problem.epsilon;
    let locals: Vec<ElementMatrices> = (0..n)
        .into_par_iter()
        .map(|m| element_matrices(problem, mesh, m, rule))
        .collect::<Result<_>>()?;

    let mut matrix = BandedMatrix::zeros(n + 2, 2, 2);
    let mut rhs = vec![0.0; n + 2];
    for (m, e) in locals.iter().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                let v = eps * e.stiffness[i][j] + e.convection[i][j] + e.mass[i][j];
                matrix.add(m + i, m + j, v);
            }
            rhs[m + i] += e.load[i];
        }
    }
    let boundary = boundary_matrix(mesh);
    for i in 0..n + 2 {
        for j in boundary.row_range(i) {
            matrix.add(i, j, -eps * boundary.get(i, j));
        }
    }
    BandedSystem::new(matrix, rhs)
}

/// Substitute `δ_{-1} = (λ - δ_0)/σ` and `δ_N = β - σ δ_{N-1}`, drop the test
/// rows of `Q_{-1}` and `Q_N`, and return the `N × N` system in
/// `δ_0 .. δ_{N-1}`.
pub fn apply_dirichlet_elimination(
    system: &BandedSystem,
    ratio: f64,
    lambda: f64,
    beta: f64,
) -> Result<BandedSystem> {
    if !(ratio.is_finite() && ratio != 0.0) {
        return Err(Error::InvalidRatio(ratio));
    }
    let full = &system.matrix;
    let total = full.dimension();
    if total < 4 {
        return Err(Error::TooFewElements(total.saturating_sub(2)));
    }
    let n = total - 2;
    let (kl, ku) = (full.lower_bandwidth(), full.upper_bandwidth());
    let mut matrix = BandedMatrix::zeros(n, kl, ku);
    let mut rhs = vec![0.0; n];
    for row in 0..n {
        let old = row + 1;
        let mut b = system.rhs[old];
        for col in full.row_range(old) {
            let a = full.get(old, col);
            if col == 0 {
                matrix.add(row, 0, -a / ratio);
                b -= a * lambda / ratio;
            } else if col == n + 1 {
                matrix.add(row, n - 1, -a * ratio);
                b -= a * beta;
            } else {
                matrix.add(row, col - 1, a);
            }
        }
        rhs[row] = b;
    }
    BandedSystem::new(matrix, rhs)
}

/// Rebuild the full coefficient vector from the interior unknowns.
pub(crate) fn restore_boundary(interior: &[f64], ratio: f64, lambda: f64, beta: f64) -> CoefficientVector {
    let n = interior.len();
    let mut deltas = Vec::with_capacity(n + 2);
    deltas.push((lambda - interior[0]) / ratio);
    deltas.extend_from_slice(interior);
    deltas.push(beta - ratio * interior[n - 1]);
    CoefficientVector::new(deltas)
}

/// Build the solution from the interior coefficients.
///
/// The end knot values are `λ` and `β` by construction of the elimination.
/// Recomputing them from the coefficients only adds rounding proportional to
/// `|δ|`, which is large for unresolved layers, so they are stored exactly.
pub(crate) fn finish(
    problem: &BvProblem,
    mesh: &GradedMesh,
    interior: &[f64],
    method: Method,
) -> Result<Solution> {
    let deltas = restore_boundary(interior, mesh.ratio(), problem.lambda, problem.beta);
    let mut solution = Solution::new(mesh.clone(), deltas, method)?;
    let last = solution.knot_values.len() - 1;
    solution.knot_values[0] = problem.lambda;
    solution.knot_values[last] = problem.beta;
    Ok(solution)
}

pub(crate) fn solve_failed(method: Method, problem: &BvProblem, mesh: &GradedMesh, row: usize) -> Error {
    Error::SolveFailed {
        method: method.as_str(),
        epsilon: problem.epsilon,
        ratio: mesh.ratio(),
        elements: mesh.element_count(),
        row,
        hint: "the layer is probably unresolved; reduce sigma or increase N",
    }
}

pub fn solve_galerkin(problem: &BvProblem, mesh: &GradedMesh, rule: &QuadratureRule) -> Result<Solution> {
    let s = mesh.ratio();
    let full = assemble_galerkin(problem, mesh, rule)?;
    let reduced = apply_dirichlet_elimination(&full, s, problem.lambda, problem.beta)?;
    let interior = reduced.solve().map_err(|e| match e {
        Error::Singular { row } | Error::ZeroPivot { row } => solve_failed(Method::Galerkin, problem, mesh, row),
        other => other,
    })?;
    finish(problem, mesh, &interior, Method::Galerkin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{gauss_legendre_rule, solve_dense_reference};
    use crate::problem::{lorenz_example, manufactured_problem, Coefficient};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rule() -> QuadratureRule {
        gauss_legendre_rule(8).unwrap()
    }

    fn close(a: &Mat3, b: &Mat3, tol: f64) -> bool {
        (0..3).all(|i| (0..3).all(|j| (a[i][j] - b[i][j]).abs() <= tol))
    }

    /// Exact integrals of the basis products for σ, h (hand-integrated
    /// polynomials, independent of the quadrature path).
    fn exact_stiffness(s: f64, h: f64) -> Mat3 {
        let c = 2.0 / (3.0 * h);
        [
            [c * 2.0 * s * s, c * s * (1.0 - 2.0 * s), -c * s],
            [c * s * (1.0 - 2.0 * s), c * 2.0 * (1.0 - s + s * s), c * (s - 2.0)],
            [-c * s, c * (s - 2.0), c * 2.0],
        ]
    }

    #[test]
    fn uniform_unit_stiffness() {
        let e = unit_element_matrices(1.0, 1.0, &rule());
        let c = 2.0 / 3.0;
        let expected = [[2.0 * c, -c, -c], [-c, 2.0 * c, -c], [-c, -c, 2.0 * c]];
        assert!(close(&e.stiffness, &expected, 1e-14));
        // the tabulated form differs only in the (0,1)/(1,0) entries
        let tab = tabulated::stiffness(1.0, 1.0);
        assert_eq!(tab[0][1], 0.0);
        assert!((e.stiffness[0][1] - tab[0][1]).abs() > 0.5);
    }

    #[test]
    fn stiffness_rows_sum_to_zero() {
        for (s, h) in [(0.5, 0.1), (1.3, 0.4), (2.0, 0.05)] {
            let e = unit_element_matrices(s, h, &rule());
            for row in e.stiffness {
                assert!(row.iter().sum::<f64>().abs() < 1e-12 / h);
            }
            assert!(close(&e.stiffness, &exact_stiffness(s, h), 1e-12));
        }
    }

    #[test]
    fn convection_matches_tabulated() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let s = rng.gen_range(0.5..2.0);
            let h = rng.gen_range(0.05..0.5);
            let e = unit_element_matrices(s, h, &rule());
            assert!(close(&e.convection, &tabulated::convection(s), 1e-12));
            assert!((e.convection[2][2] - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn mass_entries() {
        let e = unit_element_matrices(1.0, 1.0, &rule());
        assert!((e.mass[0][2] - 1.0 / 30.0).abs() < 1e-15);
        let e = unit_element_matrices(1.0, 0.5, &rule());
        assert!((e.mass[2][2] - 0.1).abs() < 1e-15);
        assert!((tabulated::mass(1.0, 0.5)[2][2] - 0.05).abs() < 1e-15);
    }

    #[test]
    fn symmetry_and_definiteness() {
        let e = unit_element_matrices(0.73, 0.21, &rule());
        for i in 0..3 {
            for j in 0..3 {
                assert!((e.stiffness[i][j] - e.stiffness[j][i]).abs() <= 1e-15 * e.stiffness[i][i].abs().max(1.0));
                assert!((e.mass[i][j] - e.mass[j][i]).abs() <= 1e-15);
            }
        }
        // mass Cholesky pivots all positive
        let c = e.mass;
        let d0 = c[0][0];
        let d1 = c[1][1] - c[0][1] * c[0][1] / d0;
        let l21 = (c[2][1] - c[2][0] * c[0][1] / d0) / d1;
        let d2 = c[2][2] - c[2][0] * c[2][0] / d0 - l21 * l21 * d1;
        assert!(d0 > 0.0 && d1 > 0.0 && d2 > 0.0);
    }

    #[test]
    fn boundary_direct_evaluation() {
        let (s, h) = (1.7, 0.3);
        let r = element_boundary_matrix(s, h);
        assert!((r[1][0] - 2.0 * s / h).abs() < 1e-13);
        assert!((r[0][0] - 2.0 * s * s / h).abs() < 1e-13);
        assert!((r[2][2] - 2.0 / h).abs() < 1e-13);
        assert!((tabulated::boundary(s, h)[1][0] - r[1][0]).abs() > 1.0);
    }

    #[test]
    fn load_unit_source() {
        let p = BvProblem::new(
            "unit",
            1.0,
            Coefficient::constant(0.0),
            Coefficient::constant(0.0),
            Coefficient::constant(1.0),
            0.0,
            0.0,
        )
        .unwrap();
        let mesh = GradedMesh::uniform(0.0, 2.0, 2).unwrap();
        let e = element_matrices(&p, &mesh, 0, &rule()).unwrap();
        let expected = [1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0];
        for k in 0..3 {
            assert!((e.load[k] - expected[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn closed_form_load() {
        let v = closed_form_load_expx(1.0, 1.0, 0.0);
        assert!((v[2] - (std::f64::consts::E - 2.0)).abs() < 1e-15);

        let problem = lorenz_example(0.5).unwrap();
        let mesh = GradedMesh::uniform(0.0, 1.0, 2).unwrap();
        let e = element_matrices(&problem, &mesh, 0, &rule()).unwrap();
        let cf = closed_form_load_expx(1.0, 0.5, 0.0);
        for k in 0..3 {
            assert!((e.load[k] - cf[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_load_small_width_limit() {
        let (s, xm) = (1.0, 0.3);
        for h in [1e-3, 1e-4] {
            let v = closed_form_load_expx(s, h, xm);
            let lead = [s / 3.0, 2.0 * (1.0 + s) / 3.0, 1.0 / 3.0];
            for k in 0..3 {
                let expected = lead[k] * h * f64::exp(xm);
                assert!(((v[k] - expected) / expected).abs() < 5e-3, "h {h} k {k}");
            }
        }
    }

    #[test]
    fn assembled_band_structure() {
        let problem = manufactured_problem(0.1).unwrap();
        let mesh = GradedMesh::new(0.0, 1.0, 8, 0.8).unwrap();
        let system = assemble_galerkin(&problem, &mesh, &rule()).unwrap();
        assert_eq!(system.dimension(), 10);
        assert_eq!(system.matrix.lower_bandwidth(), 2);
        assert_eq!(system.matrix.upper_bandwidth(), 2);
        let dense = system.matrix.to_dense();
        for (i, row) in dense.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if i.abs_diff(j) > 2 {
                    assert_eq!(*v, 0.0);
                }
            }
        }
    }

    #[test]
    fn boundary_terms_telescope() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let s = rng.gen_range(0.5..2.0);
            let mesh = GradedMesh::new(0.0, 1.0, 8, s).unwrap();
            let acc = accumulated_boundary_matrix(&mesh);
            let ends = boundary_matrix(&mesh);
            let scale = 1.0 / mesh.widths().iter().cloned().fold(f64::INFINITY, f64::min);
            for i in 0..10 {
                for j in 0..10 {
                    assert!((acc.get(i, j) - ends.get(i, j)).abs() <= 1e-12 * scale);
                }
            }
        }
    }

    #[test]
    fn homogeneous_data_only_folds_columns() {
        let problem = lorenz_example(0.2).unwrap();
        let mesh = GradedMesh::new(0.0, 1.0, 6, 0.9).unwrap();
        let full = assemble_galerkin(&problem, &mesh, &rule()).unwrap();
        let reduced = apply_dirichlet_elimination(&full, 0.9, 0.0, 0.0).unwrap();
        for r in 0..6 {
            assert_eq!(reduced.rhs[r], full.rhs[r + 1]);
        }
    }

    #[test]
    fn elimination_matches_dense_substitution() {
        // N = 2: unknowns δ_{-1}, δ_0, δ_1, δ_2
        let problem = manufactured_problem(0.3).unwrap();
        let mesh = GradedMesh::new(0.0, 1.0, 2, 0.6).unwrap();
        let s = 0.6;
        let (lam, bet) = (0.7, -1.2);
        let full = assemble_galerkin(&problem, &mesh, &rule()).unwrap();
        let reduced = apply_dirichlet_elimination(&full, s, lam, bet).unwrap();
        let a = full.matrix.to_dense();
        // δ = T y + c with y = (δ_0, δ_1)
        let t = [[-1.0 / s, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, -s]];
        let c = [lam / s, 0.0, 0.0, bet];
        for (row, old) in [(0usize, 1usize), (1, 2)] {
            for col in 0..2 {
                let v: f64 = (0..4).map(|k| a[old][k] * t[k][col]).sum();
                assert!((reduced.matrix.get(row, col) - v).abs() <= 1e-14 * v.abs().max(1.0));
            }
            let shift: f64 = (0..4).map(|k| a[old][k] * c[k]).sum();
            let b = full.rhs[old] - shift;
            assert!((reduced.rhs[row] - b).abs() <= 1e-14 * b.abs().max(1.0));
        }
    }

    #[test]
    fn reproduces_constant_solution() {
        for (eps, s, c) in [(1e-3, 0.8, 2.5), (0.5, 1.0, -1.0), (1.0, 1.3, 4.0)] {
            let problem = BvProblem::new(
                "constant",
                eps,
                Coefficient::constant(0.0),
                Coefficient::constant(1.0),
                Coefficient::constant(c),
                c,
                c,
            )
            .unwrap();
            let mesh = GradedMesh::new(0.0, 1.0, 12, s).unwrap();
            let sol = solve_galerkin(&problem, &mesh, &rule()).unwrap();
            for u in &sol.knot_values {
                assert!((u - c).abs() <= 1e-10);
            }
            for k in 0..=40 {
                let x = k as f64 / 40.0;
                assert!((sol.evaluate(x).unwrap() - c).abs() <= 1e-10);
            }
            for d in sol.coefficients.as_slice() {
                assert!((d - c / (1.0 + s)).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn lorenz_accuracy() {
        let problem = lorenz_example(0.5).unwrap();
        let mesh = GradedMesh::uniform(0.0, 1.0, 64).unwrap();
        let sol = solve_galerkin(&problem, &mesh, &rule()).unwrap();
        let exact = problem.exact.as_ref().unwrap();
        let err = mesh
            .knots()
            .iter()
            .zip(&sol.knot_values)
            .map(|(&x, u)| (exact.eval(x) - u).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-3 && err > 0.0);
        assert_eq!(sol.knot_values[0], 0.0);
        assert!(sol.knot_values[64].abs() < 1e-12);
    }

    #[test]
    fn manufactured_accuracy() {
        let problem = manufactured_problem(0.1).unwrap();
        let mesh = GradedMesh::uniform(0.0, 1.0, 128).unwrap();
        let sol = solve_galerkin(&problem, &mesh, &rule()).unwrap();
        let exact = problem.exact.as_ref().unwrap();
        let err = mesh
            .knots()
            .iter()
            .zip(&sol.knot_values)
            .map(|(&x, u)| (exact.eval(x) - u).abs())
            .fold(0.0, f64::max);
        assert!(err < 5e-3);
    }

    #[test]
    fn reduced_residual_is_small() {
        let problem = lorenz_example(0.01).unwrap();
        let mesh = GradedMesh::new(0.0, 1.0, 40, 0.85).unwrap();
        let full = assemble_galerkin(&problem, &mesh, &rule()).unwrap();
        let reduced = apply_dirichlet_elimination(&full, 0.85, 0.0, 0.0).unwrap();
        let x = reduced.solve().unwrap();
        let xn = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let bn = reduced.rhs.iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!(reduced.residual_inf(&x) <= 1e-10 * (reduced.matrix.norm_inf() * xn + bn));

        let reference = solve_dense_reference(&reduced.matrix.to_dense(), &reduced.rhs).unwrap();
        for (a, b) in x.iter().zip(&reference) {
            assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn elimination_rejects_zero_ratio() {
        let problem = lorenz_example(0.2).unwrap();
        let mesh = GradedMesh::uniform(0.0, 1.0, 4).unwrap();
        let full = assemble_galerkin(&problem, &mesh, &rule()).unwrap();
        assert_eq!(
            apply_dirichlet_elimination(&full, 0.0, 0.0, 0.0),
            Err(Error::InvalidRatio(0.0))
        );
    }

    #[test]
    fn deterministic() {
        let problem = manufactured_problem(0.05).unwrap();
        let mesh = GradedMesh::new(0.0, 1.0, 50, 0.9).unwrap();
        let a = solve_galerkin(&problem, &mesh, &rule()).unwrap();
        let b = solve_galerkin(&problem, &mesh, &rule()).unwrap();
        assert_eq!(a, b);
    }
}
