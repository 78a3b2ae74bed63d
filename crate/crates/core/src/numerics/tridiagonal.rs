use super::PIVOT_FLOOR;
use crate::{Error, Result};

/// Tridiagonal system with `sub[i] = A[i+1][i]` and `sup[i] = A[i][i+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn dimension(&self) -> usize {
        self.diag.len()
    }

    pub fn solve(&self) -> Result<Vec<f64>> {
        solve_tridiagonal(&self.sub, &self.diag, &self.sup, &self.rhs)
    }

    /// `A x` for residual checks.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.sup[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.diag.len();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][i] = self.diag[i];
            if i + 1 < n {
                a[i + 1][i] = self.sub[i];
                a[i][i + 1] = self.sup[i];
            }
        }
        a
    }
}

/// Thomas algorithm. `sub` and `sup` have length `n - 1`.
///
/// No pivoting: a pivot with magnitude below [`PIVOT_FLOOR`] is reported with
/// its row.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if rhs.len() != n {
        return Err(Error::SizeMismatch { expected: n, found: rhs.len() });
    }
    let off = n.saturating_sub(1);
    if sub.len() != off {
        return Err(Error::SizeMismatch { expected: off, found: sub.len() });
    }
    if sup.len() != off {
        return Err(Error::SizeMismatch { expected: off, found: sup.len() });
    }
    if n == 0 {
        return Ok(Vec::new());
    }

    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    for i in 0..n {
        if i > 0 {
            pivot = diag[i] - sub[i - 1] * c[i - 1];
        }
        if !(pivot.abs() >= PIVOT_FLOOR) {
            return Err(Error::ZeroPivot { row: i });
        }
        if i + 1 < n {
            c[i] = sup[i] / pivot;
        }
        d[i] = if i == 0 {
            rhs[0] / pivot
        } else {
            (rhs[i] - sub[i - 1] * d[i - 1]) / pivot
        };
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}
