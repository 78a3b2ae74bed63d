//! Quadratic B-splines on a geometrically graded mesh.
//!
//! On element `m` with local coordinate `ξ = x - x_m ∈ [0, h_m]` the three
//! splines that do not vanish are
//!
//! ```text
//! Q_{m-1} = σ (h_m - ξ)² / h_m²
//! Q_m     = (h_m² + 2 h_m σ ξ - (1 + σ) ξ²) / h_m²
//! Q_{m+1} = ξ² / h_m²
//! ```
//!
//! They are C¹ across knots only because `h_{m+1} = σ h_m`, and they sum to
//! `1 + σ` rather than one. Coefficients are indexed `δ_{-1} .. δ_N`.

use crate::{Error, GradedMesh, Result};

/// Values and first derivatives of `(Q_{m-1}, Q_m, Q_{m+1})` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalBasis {
    pub values: [f64; 3],
    pub derivatives: [f64; 3],
}

/// Evaluate the three local splines at `xi ∈ [0, width]`.
pub fn eval_local(ratio: f64, width: f64, xi: f64) -> Result<LocalBasis> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::NonPositiveWidth(width));
    }
    if !(0.0..=width).contains(&xi) {
        return Err(Error::OutsideElement { xi, width });
    }
    Ok(local_basis(ratio, width, xi))
}

#[inline]
pub(crate) fn local_basis(ratio: f64, width: f64, xi: f64) -> LocalBasis {
    let h = width;
    let s = ratio;
    let inv_h2 = 1.0 / (h * h);
    let rest = h - xi;
    LocalBasis {
        values: [
            s * rest * rest * inv_h2,
            (h * h + 2.0 * h * s * xi - (1.0 + s) * xi * xi) * inv_h2,
            xi * xi * inv_h2,
        ],
        derivatives: [
            -2.0 * s * rest * inv_h2,
            (2.0 * h * s - 2.0 * (1.0 + s) * xi) * inv_h2,
            2.0 * xi * inv_h2,
        ],
    }
}

/// Spline coefficients `δ_{-1}, δ_0, ..., δ_N` of `u_N = Σ δ_j Q_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector(Vec<f64>);

impl CoefficientVector {
    /// Wrap `N + 2` coefficients, the first being `δ_{-1}`.
    pub fn new(deltas: Vec<f64>) -> Self {
        Self(deltas)
    }

    pub fn zeros(elements: usize) -> Self {
        Self(vec![0.0; elements + 2])
    }

    /// `δ_i` for `i ∈ -1..=N`.
    pub fn get(&self, i: isize) -> f64 {
        self.0[(i + 1) as usize]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn check(&self, mesh: &GradedMesh) -> Result<()> {
        let expected = mesh.element_count() + 2;
        if self.0.len() != expected {
            return Err(Error::SizeMismatch {
                expected,
                found: self.0.len(),
            });
        }
        Ok(())
    }

    /// The three coefficients active on element `m`: `(δ_{m-1}, δ_m, δ_{m+1})`.
    pub(crate) fn local(&self, m: usize) -> [f64; 3] {
        [self.0[m], self.0[m + 1], self.0[m + 2]]
    }
}

/// Value and slope of `u_N` at a knot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodalValue {
    pub value: f64,
    pub derivative: f64,
}

/// `u_m = σ δ_{m-1} + δ_m` and `u'_m = 2σ/h_m (δ_m - δ_{m-1})` at every knot.
///
/// The last knot has no element to its right, so it uses the right end of
/// element `N - 1`: `u'_N = 2/h_{N-1} (δ_N - δ_{N-1})`.
pub fn nodal_values(mesh: &GradedMesh, deltas: &CoefficientVector) -> Result<Vec<NodalValue>> {
    deltas.check(mesh)?;
    let s = mesh.ratio();
    let n = mesh.element_count();
    let mut out = Vec::with_capacity(n + 1);
    for m in 0..n {
        let (prev, cur) = (deltas.get(m as isize - 1), deltas.get(m as isize));
        out.push(NodalValue {
            value: s * prev + cur,
            derivative: 2.0 * s / mesh.width(m) * (cur - prev),
        });
    }
    let (prev, last) = (deltas.get(n as isize - 1), deltas.get(n as isize));
    out.push(NodalValue {
        value: s * prev + last,
        derivative: 2.0 / mesh.width(n - 1) * (last - prev),
    });
    Ok(out)
}

/// Knot values `u_0 .. u_N` only.
pub fn knot_values(mesh: &GradedMesh, deltas: &CoefficientVector) -> Result<Vec<f64>> {
    Ok(nodal_values(mesh, deltas)?
        .into_iter()
        .map(|v| v.value)
        .collect())
}

fn eval_with<F>(mesh: &GradedMesh, deltas: &CoefficientVector, x: f64, pick: F) -> Result<f64>
where
    F: Fn(&LocalBasis) -> [f64; 3],
{
    deltas.check(mesh)?;
    let m = mesh.locate(x)?;
    let h = mesh.width(m);
    // measure from the nearer knot so both ends are hit exactly
    let (left, right) = (x - mesh.knot(m), mesh.knot(m + 1) - x);
    let xi = if left <= right { left } else { h - right }.clamp(0.0, h);
    let basis = local_basis(mesh.ratio(), h, xi);
    let d = deltas.local(m);
    let w = pick(&basis);
    Ok(d[0] * w[0] + d[1] * w[1] + d[2] * w[2])
}

/// `u_N(x)` anywhere in the domain.
pub fn evaluate(mesh: &GradedMesh, deltas: &CoefficientVector, x: f64) -> Result<f64> {
    eval_with(mesh, deltas, x, |b| b.values)
}

/// `u_N'(x)` anywhere in the domain (right-sided at interior knots).
pub fn evaluate_derivative(mesh: &GradedMesh, deltas: &CoefficientVector, x: f64) -> Result<f64> {
    eval_with(mesh, deltas, x, |b| b.derivatives)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn values_at_left_end() {
        let b = eval_local(0.7, 0.3, 0.0).unwrap();
        let expected = [0.7, 1.0, 0.0];
        for k in 0..3 {
            assert!((b.values[k] - expected[k]).abs() < 1e-15);
        }
        let d = b.derivatives;
        assert!((d[0] + 2.0 * 0.7 / 0.3).abs() < 1e-14);
        assert!((d[1] - 2.0 * 0.7 / 0.3).abs() < 1e-14);
        assert_eq!(d[2], 0.0);
    }

    #[test]
    fn uniform_midpoint() {
        let b = eval_local(1.0, 1.0, 0.5).unwrap();
        assert_eq!(b.values, [0.25, 1.5, 0.25]);
    }

    #[test]
    fn local_errors() {
        assert!(matches!(
            eval_local(1.0, 1.0, 1.5),
            Err(Error::OutsideElement { .. })
        ));
        assert!(matches!(
            eval_local(1.0, 1.0, -0.1),
            Err(Error::OutsideElement { .. })
        ));
        assert_eq!(eval_local(1.0, 0.0, 0.0), Err(Error::NonPositiveWidth(0.0)));
    }

    #[test]
    fn nodal_zero_and_constant() {
        let mesh = GradedMesh::uniform(0.0, 1.0, 5).unwrap();
        for v in nodal_values(&mesh, &CoefficientVector::zeros(5)).unwrap() {
            assert_eq!(v, NodalValue { value: 0.0, derivative: 0.0 });
        }
        let c = CoefficientVector::new(vec![1.5; 7]);
        for v in nodal_values(&mesh, &c).unwrap() {
            assert_eq!(v.value, 3.0);
            assert_eq!(v.derivative, 0.0);
        }
        for x in [0.0, 0.13, 0.5, 0.77, 1.0] {
            assert!((evaluate(&mesh, &c, x).unwrap() - 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn nodal_relation_by_substitution() {
        // σ = 2, N = 2 on [0, 1.5]: h_0 = 0.5
        let mesh = GradedMesh::new(0.0, 1.5, 2, 2.0).unwrap();
        assert!((mesh.width(0) - 0.5).abs() < 1e-15);
        let deltas = CoefficientVector::new(vec![1.0, 3.0, 0.0, 0.0]);
        let v = nodal_values(&mesh, &deltas).unwrap()[0];
        assert_eq!(v.value, 5.0);
        assert!((v.derivative - 16.0).abs() < 1e-13);
    }

    #[test]
    fn size_mismatch() {
        let mesh = GradedMesh::uniform(0.0, 1.0, 5).unwrap();
        let short = CoefficientVector::zeros(3);
        assert_eq!(
            nodal_values(&mesh, &short),
            Err(Error::SizeMismatch { expected: 7, found: 5 })
        );
        assert!(evaluate(&mesh, &short, 0.5).is_err());
    }

    #[test]
    fn evaluate_outside_domain() {
        let mesh = GradedMesh::uniform(0.0, 1.0, 5).unwrap();
        let c = CoefficientVector::zeros(5);
        assert!(matches!(
            evaluate(&mesh, &c, 1.2),
            Err(Error::OutsideDomain { .. })
        ));
    }

    fn coeffs(n: usize, seed: &[f64]) -> CoefficientVector {
        CoefficientVector::new((0..n + 2).map(|i| seed[i % seed.len()] * (1.0 + i as f64).sin()).collect())
    }

    proptest! {
        #[test]
        fn partition_sums_to_one_plus_ratio(s in 0.05f64..5.0, h in 1e-4f64..10.0, t in 0.0f64..=1.0) {
            let b = local_basis(s, h, t * h);
            let sum: f64 = b.values.iter().sum();
            prop_assert!((sum - (1.0 + s)).abs() <= 1e-13 * (1.0 + s));
            let dsum: f64 = b.derivatives.iter().sum();
            prop_assert!(dsum.abs() <= 1e-13 * (1.0 + s) / h);
            prop_assert!(b.values.iter().all(|&v| v >= 0.0));
        }

        #[test]
        fn derivatives_match_central_differences(s in 0.1f64..4.0, h in 1e-3f64..2.0, t in 0.01f64..0.99) {
            let xi = t * h;
            let step = 1e-6 * h;
            let plus = local_basis(s, h, xi + step).values;
            let minus = local_basis(s, h, xi - step).values;
            let d = local_basis(s, h, xi).derivatives;
            let scale = 2.0 * (1.0 + s) / h;
            for k in 0..3 {
                let fd = (plus[k] - minus[k]) / (2.0 * step);
                prop_assert!((fd - d[k]).abs() <= 1e-6 * scale.max(d[k].abs()));
            }
        }

        #[test]
        fn c1_continuity_across_knots(
            n in 2usize..30,
            s in 0.3f64..2.5,
            seed in prop::collection::vec(-5.0f64..5.0, 1..8),
        ) {
            let mesh = GradedMesh::new(0.0, 1.0, n, s).unwrap();
            let c = coeffs(n, &seed);
            for m in 1..n {
                let left = local_basis(s, mesh.width(m - 1), mesh.width(m - 1));
                let right = local_basis(s, mesh.width(m), 0.0);
                let dl = c.local(m - 1);
                let dr = c.local(m);
                let vl: f64 = (0..3).map(|k| dl[k] * left.values[k]).sum();
                let vr: f64 = (0..3).map(|k| dr[k] * right.values[k]).sum();
                let gl: f64 = (0..3).map(|k| dl[k] * left.derivatives[k]).sum();
                let gr: f64 = (0..3).map(|k| dr[k] * right.derivatives[k]).sum();
                let vscale = dl.iter().chain(&dr).map(|v| v.abs()).fold(1.0, f64::max) * (1.0 + s);
                let gscale = vscale / mesh.width(m).min(mesh.width(m - 1));
                prop_assert!((vl - vr).abs() <= 1e-12 * vscale);
                prop_assert!((gl - gr).abs() <= 1e-12 * gscale);
            }
        }

        #[test]
        fn evaluate_at_knot_matches_nodal(n in 2usize..30, s in 0.3f64..2.5, seed in prop::collection::vec(-5.0f64..5.0, 1..8)) {
            let mesh = GradedMesh::new(0.0, 1.0, n, s).unwrap();
            let c = coeffs(n, &seed);
            let nodal = nodal_values(&mesh, &c).unwrap();
            for (m, v) in nodal.iter().enumerate() {
                let u = evaluate(&mesh, &c, mesh.knot(m)).unwrap();
                prop_assert!((u - v.value).abs() <= 1e-12 * (1.0 + v.value.abs()));
                let du = evaluate_derivative(&mesh, &c, mesh.knot(m)).unwrap();
                prop_assert!((du - v.derivative).abs() <= 1e-10 * (1.0 + v.derivative.abs()));
            }
        }
    }
}
