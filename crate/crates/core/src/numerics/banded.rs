use super::PIVOT_FLOOR;
use crate::{Error, Result};

/// Square band matrix with `kl` sub- and `ku` super-diagonals.
///
/// Row `i` stores columns `i - kl ..= i + ku` contiguously; entries outside
/// the band are structurally zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self {
            n,
            kl,
            ku,
            data: vec![0.0; n * (kl + ku + 1)],
        }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.kl >= i && j <= i + self.ku
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        i * (self.kl + self.ku + 1) + (j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.index(i, j)]
        } else {
            0.0
        }
    }

    /// Panics if `(i, j)` is outside the band.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside band");
        let k = self.index(i, j);
        self.data[k] = value;
    }

    /// Panics if `(i, j)` is outside the band.
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside band");
        let k = self.index(i, j);
        self.data[k] += value;
    }

    /// Column range of the band in row `i`.
    pub fn row_range(&self, i: usize) -> std::ops::RangeInclusive<usize> {
        i.saturating_sub(self.kl)..=(i + self.ku).min(self.n - 1)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row_range(i).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row_range(i).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandedSystem {
    pub matrix: BandedMatrix,
    pub rhs: Vec<f64>,
}

impl BandedSystem {
    pub fn new(matrix: BandedMatrix, rhs: Vec<f64>) -> Result<Self> {
        if rhs.len() != matrix.dimension() {
            return Err(Error::SizeMismatch {
                expected: matrix.dimension(),
                found: rhs.len(),
            });
        }
        Ok(Self { matrix, rhs })
    }

    pub fn dimension(&self) -> usize {
        self.matrix.dimension()
    }

    pub fn solve(&self) -> Result<Vec<f64>> {
        solve_banded(self)
    }

    /// `‖A x - b‖∞`.
    pub fn residual_inf(&self, x: &[f64]) -> f64 {
        self.matrix
            .apply(x)
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Band LU with partial pivoting restricted to the `kl` rows below the
/// diagonal. Row interchanges widen the upper band of `U` to `kl + ku`.
pub fn solve_banded(system: &BandedSystem) -> Result<Vec<f64>> {
    let a = &system.matrix;
    let n = a.n;
    if system.rhs.len() != n {
        return Err(Error::SizeMismatch { expected: n, found: system.rhs.len() });
    }
    let (kl, ku) = (a.kl, a.ku);
    let upper = kl + ku;
    let width = kl + upper + 1;
    // work[i][j - i + kl] for j in i - kl ..= i + kl + ku
    let mut work = vec![0.0; n * width];
    let at = |i: usize, j: usize| i * width + (j + kl - i);
    for i in 0..n {
        for j in a.row_range(i) {
            work[at(i, j)] = a.get(i, j);
        }
    }
    let mut b = system.rhs.clone();

    for k in 0..n {
        let last_row = (k + kl).min(n - 1);
        let last_col = (k + upper).min(n - 1);
        let mut p = k;
        for r in k + 1..=last_row {
            if work[at(r, k)].abs() > work[at(p, k)].abs() {
                p = r;
            }
        }
        let pivot = work[at(p, k)];
        if !(pivot.abs() >= PIVOT_FLOOR) {
            return Err(Error::Singular { row: k });
        }
        if p != k {
            for j in k..=last_col {
                work.swap(at(k, j), at(p, j));
            }
            b.swap(k, p);
        }
        for r in k + 1..=last_row {
            let factor = work[at(r, k)] / pivot;
            if factor == 0.0 {
                continue;
            }
            work[at(r, k)] = 0.0;
            for j in k + 1..=last_col {
                work[at(r, j)] -= factor * work[at(k, j)];
            }
            b[r] -= factor * b[k];
        }
    }

    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let last_col = (i + upper).min(n - 1);
        let mut s = b[i];
        for j in i + 1..=last_col {
            s -= work[at(i, j)] * x[j];
        }
        x[i] = s / work[at(i, i)];
    }
    if let Some(row) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::Singular { row });
    }
    Ok(x)
}
