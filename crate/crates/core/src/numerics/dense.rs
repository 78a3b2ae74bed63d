use super::PIVOT_FLOOR;
use crate::{Error, Result};

/// Gaussian elimination with partial pivoting on a dense row-major matrix.
///
/// Intended as a verification oracle for the band solvers.
pub fn solve_dense_reference(matrix: &[Vec<f64>], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = matrix.len();
    if n > 2000 {
        return Err(Error::TooLarge(n));
    }
    if rhs.len() != n {
        return Err(Error::SizeMismatch { expected: n, found: rhs.len() });
    }
    if let Some(row) = matrix.iter().find(|r| r.len() != n) {
        return Err(Error::SizeMismatch { expected: n, found: row.len() });
    }

    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut b = rhs.to_vec();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .unwrap();
        if !(a[p][k].abs() >= PIVOT_FLOOR) {
            return Err(Error::Singular { row: k });
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let factor = a[i][k] / a[k][k];
            if factor == 0.0 {
                continue;
            }
            for j in k..n {
                a[i][j] -= factor * a[k][j];
            }
            b[i] -= factor * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity() {
        let a = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        assert_eq!(solve_dense_reference(&a, &[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve_dense_reference(&a, &[3.0, 4.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hilbert_six() {
        let n = 6;
        let a: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| 1.0 / (i + j + 1) as f64).collect())
            .collect();
        let rhs: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
        let x = solve_dense_reference(&a, &rhs).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn singular() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(matches!(solve_dense_reference(&a, &[1.0, 2.0]), Err(Error::Singular { row: 1 })));
    }

    #[test]
    fn too_large() {
        let a = vec![Vec::new(); 2001];
        assert_eq!(solve_dense_reference(&a, &[0.0; 2001]), Err(Error::TooLarge(2001)));
    }
}
