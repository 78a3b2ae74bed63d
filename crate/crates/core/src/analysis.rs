//! Error measurement, convergence studies and mesh-ratio search.

use rayon::prelude::*;

use crate::{solve, BvProblem, Error, GradedMesh, Method, Result, Solution, SolverOptions};

/// Differences of knot values below this are treated as flat when counting
/// extrema.
pub const FLAT_THRESHOLD: f64 = 1e-12;

/// Errors at or below this are roundoff; no convergence order is reported.
pub const ORDER_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointError {
    pub x: f64,
    pub exact: f64,
    pub numeric: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub linf: f64,
    pub argmax_x: f64,
    pub pointwise: Vec<PointError>,
}

impl ErrorReport {
    pub fn from_samples<I>(samples: I) -> Self
    where
        I: IntoIterator<Item = (f64, f64, f64)>,
    {
        let pointwise: Vec<PointError> = samples
            .into_iter()
            .map(|(x, exact, numeric)| PointError {
                x,
                exact,
                numeric,
                error: (exact - numeric).abs(),
            })
            .collect();
        let (mut linf, mut argmax_x) = (0.0, pointwise.first().map_or(f64::NAN, |p| p.x));
        for p in &pointwise {
            if p.error > linf || p.error.is_nan() {
                linf = p.error;
                argmax_x = p.x;
            }
        }
        Self {
            linf,
            argmax_x,
            pointwise,
        }
    }
}

/// Maximum error over the knots against an exact solution.
pub fn linf_error_at_knots<F>(solution: &Solution, exact: F) -> ErrorReport
where
    F: Fn(f64) -> f64,
{
    ErrorReport::from_samples(
        solution
            .mesh
            .knots()
            .iter()
            .zip(&solution.knot_values)
            .map(|(&x, &u)| (x, exact(x), u)),
    )
}

/// [`linf_error_at_knots`] with the problem's exact solution.
pub fn knot_error(solution: &Solution, problem: &BvProblem) -> Result<ErrorReport> {
    let exact = problem.exact.as_ref().ok_or(Error::MissingExact)?;
    Ok(linf_error_at_knots(solution, |x| exact.eval(x)))
}

/// Error on `samples` uniform points, catching overshoot between knots.
pub fn dense_error(solution: &Solution, problem: &BvProblem, samples: usize) -> Result<ErrorReport> {
    let exact = problem.exact.as_ref().ok_or(Error::MissingExact)?;
    let (a, b) = (solution.mesh.a(), solution.mesh.b());
    let last = samples.max(2) - 1;
    let points = (0..=last)
        .map(|k| {
            let x = if k == last { b } else { a + (b - a) * k as f64 / last as f64 };
            Ok((x, exact.eval(x), solution.evaluate(x)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorReport::from_samples(points))
}

/// Strict sign changes between successive differences, ignoring differences
/// smaller than [`FLAT_THRESHOLD`].
pub fn count_interior_extrema(values: &[f64]) -> usize {
    let mut previous: Option<bool> = None;
    let mut count = 0;
    for w in values.windows(2) {
        let d = w[1] - w[0];
        if d.abs() < FLAT_THRESHOLD {
            continue;
        }
        let rising = d > 0.0;
        if previous.is_some_and(|p| p != rising) {
            count += 1;
        }
        previous = Some(rising);
    }
    count
}

pub fn solution_extrema(solution: &Solution) -> usize {
    count_interior_extrema(&solution.knot_values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchKind {
    Grid,
    Golden,
}

/// One evaluated mesh ratio. `linf` is `None` when the solve failed.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaSample {
    pub sigma: f64,
    pub linf: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaSearchResult {
    pub samples: Vec<SigmaSample>,
    pub best_sigma: f64,
    pub best_linf: f64,
    pub kind: SearchKind,
}

impl SigmaSearchResult {
    /// Pick the minimum; ties go to the larger σ.
    fn from_samples(samples: Vec<SigmaSample>, kind: SearchKind) -> Result<Self> {
        let mut best: Option<(f64, f64)> = None;
        for s in &samples {
            let Some(linf) = s.linf else { continue };
            best = match best {
                Some((bs, bl)) if linf > bl || (linf == bl && s.sigma <= bs) => Some((bs, bl)),
                _ => Some((s.sigma, linf)),
            };
        }
        let (best_sigma, best_linf) = best.ok_or(Error::AllSolvesFailed)?;
        Ok(Self {
            samples,
            best_sigma,
            best_linf,
            kind,
        })
    }
}

/// `σ ↦ L∞` at the knots for a fixed problem, element count and method.
pub fn knot_error_for_sigma(
    problem: &BvProblem,
    elements: usize,
    method: Method,
    sigma: f64,
    options: &SolverOptions,
) -> Result<f64> {
    let mesh = GradedMesh::new(0.0, 1.0, elements, sigma)?;
    let solution = solve(problem, &mesh, method, options)?;
    Ok(knot_error(&solution, problem)?.linf)
}

fn sample(result: Result<f64>, sigma: f64) -> SigmaSample {
    match result {
        Ok(linf) => SigmaSample { sigma, linf: Some(linf), failure: None },
        Err(e) => SigmaSample { sigma, linf: None, failure: Some(e.to_string()) },
    }
}

/// Solve once per grid value. Failed solves are recorded, not fatal.
pub fn sweep_sigma(
    problem: &BvProblem,
    elements: usize,
    method: Method,
    grid: &[f64],
    options: &SolverOptions,
) -> Result<SigmaSearchResult> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("empty".into()));
    }
    if let Some(bad) = grid.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
        return Err(Error::InvalidGrid(format!("non-positive ratio {bad}")));
    }
    if !problem.has_exact() {
        return Err(Error::MissingExact);
    }
    let samples: Vec<SigmaSample> = grid
        .par_iter()
        .map(|&s| sample(knot_error_for_sigma(problem, elements, method, s, options), s))
        .collect();
    SigmaSearchResult::from_samples(samples, SearchKind::Grid)
}

/// `lo, lo + step, ...` up to `hi` inclusive (within a small fraction of the step).
pub fn sigma_grid(lo: f64, step: f64, hi: f64) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && step.is_finite() && step > 0.0 && hi >= lo) {
        return Err(Error::InvalidGrid(format!("{lo}:{step}:{hi}")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| lo + k as f64 * step).collect())
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimization of `objective` on `[lo, hi]`.
///
/// `None` from the objective is treated as `+∞`, which moves the bracket away
/// from failing points. Returns every evaluated point, the bracket center
/// last.
pub fn golden_section<F>(mut objective: F, lo: f64, hi: f64, tol: f64) -> Vec<(f64, Option<f64>)>
where
    F: FnMut(f64) -> Option<f64>,
{
    let mut evaluated = Vec::new();
    let mut eval = |x: f64, evaluated: &mut Vec<(f64, Option<f64>)>| {
        let v = objective(x);
        evaluated.push((x, v));
        v.unwrap_or(f64::INFINITY)
    };
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c, &mut evaluated);
    let mut fd = eval(d, &mut evaluated);
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c, &mut evaluated);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d, &mut evaluated);
        }
    }
    eval(0.5 * (a + b), &mut evaluated);
    evaluated
}

/// Golden-section search plus an 11-point grid on the same interval; the
/// better of the two is returned.
pub fn optimize_with<F>(mut objective: F, lo: f64, hi: f64, tol: f64) -> Result<SigmaSearchResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo > 0.0 && lo < hi && hi <= 1.0) {
        return Err(Error::InvalidSearchInterval { lo, hi });
    }
    if !(tol >= 1e-4) {
        return Err(Error::ToleranceTooSmall(tol));
    }
    let mut failures = Vec::new();
    let evaluated = golden_section(
        |s| match objective(s) {
            Ok(v) if v.is_finite() => Some(v),
            Ok(v) => {
                failures.push((s, format!("non-finite error {v}")));
                None
            }
            Err(e) => {
                failures.push((s, e.to_string()));
                None
            }
        },
        lo,
        hi,
        tol,
    );
    let mut samples: Vec<SigmaSample> = evaluated
        .into_iter()
        .map(|(sigma, linf)| SigmaSample {
            sigma,
            linf,
            failure: if linf.is_none() {
                failures.iter().find(|(s, _)| *s == sigma).map(|(_, m)| m.clone())
            } else {
                None
            },
        })
        .collect();
    for k in 0..=10 {
        let s = if k == 10 { hi } else { lo + (hi - lo) * k as f64 / 10.0 };
        samples.push(sample(objective(s), s));
    }
    SigmaSearchResult::from_samples(samples, SearchKind::Golden)
}

pub fn optimize_sigma_golden(
    problem: &BvProblem,
    elements: usize,
    method: Method,
    interval: (f64, f64),
    tol: f64,
    options: &SolverOptions,
) -> Result<SigmaSearchResult> {
    if !problem.has_exact() {
        return Err(Error::MissingExact);
    }
    optimize_with(
        |s| knot_error_for_sigma(problem, elements, method, s, options),
        interval.0,
        interval.1,
        tol,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub elements: usize,
    pub linf: f64,
    /// `log2(e_{N/2} / e_N)`, absent on the first row or at roundoff level.
    pub order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub method: Method,
    pub sigma: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn orders(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.order).collect()
    }
}

pub fn convergence_study(
    problem: &BvProblem,
    method: Method,
    sigma: f64,
    elements: &[usize],
    options: &SolverOptions,
) -> Result<ConvergenceTable> {
    if elements.is_empty() || elements.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(Error::NotDoubling(elements.to_vec()));
    }
    if !problem.has_exact() {
        return Err(Error::MissingExact);
    }
    let errors: Vec<f64> = elements
        .par_iter()
        .map(|&n| knot_error_for_sigma(problem, n, method, sigma, options))
        .collect::<Result<_>>()?;
    let rows = elements
        .iter()
        .zip(&errors)
        .enumerate()
        .map(|(k, (&n, &linf))| {
            let order = (k > 0)
                .then(|| errors[k - 1])
                .filter(|&coarse| coarse > ORDER_FLOOR && linf > ORDER_FLOOR)
                .map(|coarse| (coarse / linf).log2());
            ConvergenceRow { elements: n, linf, order }
        })
        .collect();
    Ok(ConvergenceTable { method, sigma, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{lorenz_exact, lorenz_example, manufactured_problem, Coefficient};
    use proptest::prelude::*;

    #[test]
    fn identical_values_have_zero_error() {
        let r = ErrorReport::from_samples([(0.0, 1.0, 1.0), (0.5, 2.0, 2.0)]);
        assert_eq!(r.linf, 0.0);
    }

    #[test]
    fn maximum_and_location() {
        let r = ErrorReport::from_samples([(0.0, 0.0, 0.0), (0.5, 1.0, 0.9), (1.0, 0.0, 0.05)]);
        assert!((r.linf - 0.1).abs() < 1e-15);
        assert_eq!(r.argmax_x, 0.5);
    }

    #[test]
    fn missing_exact() {
        let p = BvProblem::new(
            "noexact",
            0.1,
            Coefficient::constant(1.0),
            Coefficient::constant(1.0),
            Coefficient::constant(1.0),
            0.0,
            0.0,
        )
        .unwrap();
        let mesh = GradedMesh::uniform(0.0, 1.0, 4).unwrap();
        let sol = solve(&p, &mesh, Method::Galerkin, &SolverOptions::default()).unwrap();
        assert_eq!(knot_error(&sol, &p), Err(Error::MissingExact));
        assert!(sweep_sigma(&p, 4, Method::Galerkin, &[1.0], &SolverOptions::default()).is_err());
    }

    #[test]
    fn lorenz_knot_error() {
        let p = lorenz_example(0.5).unwrap();
        let mesh = GradedMesh::uniform(0.0, 1.0, 64).unwrap();
        let sol = solve(&p, &mesh, Method::Galerkin, &SolverOptions::default()).unwrap();
        let r = knot_error(&sol, &p).unwrap();
        assert!(r.linf > 0.0 && r.linf < 1e-3);
        assert_eq!(r.pointwise.len(), 65);
        let dense = dense_error(&sol, &p, 201).unwrap();
        assert!(dense.linf >= r.linf * 0.5);
        assert_eq!(dense.pointwise.len(), 201);
    }

    #[test]
    fn extrema_examples() {
        assert_eq!(count_interior_extrema(&[0.0, 1.0, 2.0, 3.0]), 0);
        assert_eq!(count_interior_extrema(&[0.0, 1.0, 0.0, 1.0, 0.0]), 3);
        assert_eq!(count_interior_extrema(&[1.0, 1.0, 1.0]), 0);
        assert_eq!(count_interior_extrema(&[0.0, 1.0, 1.0 + 1e-14, 0.0]), 1);
        let mesh = GradedMesh::new(0.0, 1.0, 20, 0.7).unwrap();
        let exact: Vec<f64> = mesh.knots().iter().map(|&x| lorenz_exact(0.01, x)).collect();
        assert_eq!(count_interior_extrema(&exact), 1);
    }

    #[test]
    fn singleton_sweep_equals_direct_solve() {
        let p = lorenz_example(0.05).unwrap();
        let opts = SolverOptions::default();
        let r = sweep_sigma(&p, 20, Method::Subdomain, &[1.0], &opts).unwrap();
        assert_eq!(r.best_sigma, 1.0);
        let mesh = GradedMesh::uniform(0.0, 1.0, 20).unwrap();
        let direct = knot_error(&solve(&p, &mesh, Method::Subdomain, &opts).unwrap(), &p).unwrap();
        assert_eq!(r.best_linf, direct.linf);
    }

    #[test]
    fn grading_helps_in_the_layer() {
        let grid = sigma_grid(0.5, 0.05, 1.0).unwrap();
        assert_eq!(grid.len(), 11);
        let opts = SolverOptions::default();
        let lorenz = lorenz_example(0.01).unwrap();
        let r = sweep_sigma(&lorenz, 20, Method::Galerkin, &grid, &opts).unwrap();
        let uniform = r.samples.last().unwrap().linf.unwrap();
        assert!(r.best_linf < uniform);
        let manufactured = manufactured_problem(0.01).unwrap();
        for method in Method::ALL {
            let r = sweep_sigma(&manufactured, 20, method, &grid, &opts).unwrap();
            assert!(r.best_sigma < 1.0, "{method}");
        }
    }

    #[test]
    fn ties_prefer_larger_sigma() {
        let samples = vec![
            SigmaSample { sigma: 0.6, linf: Some(1.0), failure: None },
            SigmaSample { sigma: 0.8, linf: Some(1.0), failure: None },
            SigmaSample { sigma: 0.7, linf: None, failure: Some("x".into()) },
        ];
        let r = SigmaSearchResult::from_samples(samples, SearchKind::Grid).unwrap();
        assert_eq!(r.best_sigma, 0.8);
    }

    #[test]
    fn all_failures() {
        let samples = vec![SigmaSample { sigma: 0.6, linf: None, failure: Some("x".into()) }];
        assert_eq!(
            SigmaSearchResult::from_samples(samples, SearchKind::Grid),
            Err(Error::AllSolvesFailed)
        );
    }

    #[test]
    fn golden_on_quadratic() {
        let r = optimize_with(|s| Ok((s - 0.7) * (s - 0.7)), 0.1, 1.0, 1e-4).unwrap();
        assert!((r.best_sigma - 0.7).abs() < 1e-3);
        assert_eq!(r.kind, SearchKind::Golden);
    }

    #[test]
    fn golden_not_worse_than_grid() {
        // two wells; the grid finds the deeper one
        let f = |s: f64| Ok(((s - 0.25) * 20.0).powi(2).min(((s - 0.9) * 20.0).powi(2) - 0.5));
        let r = optimize_with(f, 0.1, 1.0, 1e-3).unwrap();
        let grid_min = (0..=10)
            .map(|k| f(0.1 + 0.09 * k as f64).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(r.best_linf <= grid_min + 1e-12);
    }

    #[test]
    fn golden_moves_away_from_failures() {
        let r = optimize_with(
            |s| if s > 0.8 { Err(Error::SingularExact) } else { Ok((s - 0.3).abs()) },
            0.1,
            1.0,
            1e-4,
        )
        .unwrap();
        assert!((r.best_sigma - 0.3).abs() < 1e-3);
        assert!(r.samples.iter().any(|s| s.failure.is_some()));
    }

    #[test]
    fn golden_preconditions() {
        let f = |_s: f64| Ok(0.0);
        assert!(matches!(optimize_with(f, 0.0, 1.0, 1e-3), Err(Error::InvalidSearchInterval { .. })));
        assert!(matches!(optimize_with(f, 0.5, 1.2, 1e-3), Err(Error::InvalidSearchInterval { .. })));
        assert!(matches!(optimize_with(f, 0.5, 0.4, 1e-3), Err(Error::InvalidSearchInterval { .. })));
        assert_eq!(optimize_with(f, 0.2, 0.9, 1e-5), Err(Error::ToleranceTooSmall(1e-5)));
    }

    #[test]
    fn golden_on_lorenz() {
        let p = lorenz_example(0.01).unwrap();
        let opts = SolverOptions::default();
        let uniform = knot_error_for_sigma(&p, 20, Method::Galerkin, 1.0, &opts).unwrap();
        let r = optimize_sigma_golden(&p, 20, Method::Galerkin, (0.3, 1.0), 1e-3, &opts).unwrap();
        assert!(r.best_linf <= 0.5 * uniform);
    }

    #[test]
    fn convergence_orders() {
        let p = lorenz_example(0.5).unwrap();
        let opts = SolverOptions::default();
        let t = convergence_study(&p, Method::Galerkin, 1.0, &[32, 64, 128, 256], &opts).unwrap();
        assert!(t.rows[0].order.is_none());
        assert_eq!(t.orders().len(), 3);
        assert!(t.orders().iter().all(|&o| o >= 1.8));
        let t = convergence_study(&p, Method::Subdomain, 1.0, &[32, 64, 128, 256], &opts).unwrap();
        assert!(t.orders().iter().all(|&o| o >= 1.5));
        assert!(convergence_study(&p, Method::Galerkin, 1.0, &[32, 60], &opts).is_err());
    }

    #[test]
    fn convergence_on_representable_solution() {
        let c = 1.5;
        let p = BvProblem::new(
            "constant",
            0.1,
            Coefficient::constant(0.0),
            Coefficient::constant(1.0),
            Coefficient::constant(c),
            c,
            c,
        )
        .unwrap()
        .with_exact(Coefficient::constant(c));
        let t = convergence_study(&p, Method::Galerkin, 1.0, &[8, 16, 32], &SolverOptions::default()).unwrap();
        assert!(t.rows.iter().all(|r| r.linf <= 1e-10));
        assert!(t.orders().is_empty());
    }

    proptest! {
        #[test]
        fn strictly_monotone_has_no_extrema(v in prop::collection::vec(0.01f64..1.0, 2..50)) {
            let mut acc = 0.0;
            let seq: Vec<f64> = v.iter().map(|d| { acc += d; acc }).collect();
            prop_assert_eq!(count_interior_extrema(&seq), 0);
        }

        #[test]
        fn alternating_has_k_minus_two(k in 2usize..60) {
            let seq: Vec<f64> = (0..k).map(|i| (i % 2) as f64).collect();
            prop_assert_eq!(count_interior_extrema(&seq), k - 2);
        }

        #[test]
        fn linf_is_order_invariant(errs in prop::collection::vec(-1.0f64..1.0, 1..40), shift in 0usize..40) {
            let samples: Vec<(f64, f64, f64)> = errs.iter().enumerate().map(|(i, e)| (i as f64, 0.0, *e)).collect();
            let mut rotated = samples.clone();
            let len = rotated.len();
            rotated.rotate_left(shift % len);
            let a = ErrorReport::from_samples(samples);
            let b = ErrorReport::from_samples(rotated);
            prop_assert_eq!(a.linf, b.linf);
            let at = a.pointwise.iter().find(|p| p.x == a.argmax_x).unwrap();
            prop_assert_eq!(at.error, a.linf);
        }
    }
}
