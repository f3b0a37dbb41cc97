//! Dense complex linear algebra: square matrices and LU with partial pivoting.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
use thiserror::Error;

/// Pivot magnitude ratio above which a factorisation is treated as singular.
pub const SINGULAR_PIVOT_RATIO: f64 = 1e14;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is singular (condition estimate {condition_estimate:e})")]
    Singular { condition_estimate: f64 },
    #[error("dimension mismatch: matrix is {matrix}x{matrix}, vector has {vector} entries")]
    Dimension { matrix: usize, vector: usize },
}

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.data
            .chunks(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.data
            .chunks(self.n.max(1))
            .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// LU factorisation with row partial pivoting; consumes the matrix.
    pub fn lu(self) -> Result<LuFactors, LinalgError> {
        let n = self.n;
        let mut a = self.data;
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (pivot_row, pivot_abs) =
                (k..n)
                    .map(|i| (i, a[i * n + k].norm()))
                    .fold(
                        (k, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pivot_abs == 0.0 {
                return Err(LinalgError::Singular {
                    condition_estimate: f64::INFINITY,
                });
            }
            if pivot_row != k {
                for c in 0..n {
                    a.swap(k * n + c, pivot_row * n + c);
                }
                perm.swap(k, pivot_row);
            }
            let pivot = a[k * n + k];
            for i in (k + 1)..n {
                let factor = a[i * n + k] / pivot;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                a[i * n + k] = factor;
                let (head, tail) = a.split_at_mut(i * n);
                let upper = &head[k * n + k + 1..(k + 1) * n];
                for (x, u) in tail[k + 1..n].iter_mut().zip(upper) {
                    *x -= factor * u;
                }
            }
        }

        let (min_pivot, max_pivot) = (0..n)
            .map(|k| a[k * n + k].norm())
            .fold((f64::INFINITY, 0.0_f64), |(lo, hi), p| {
                (lo.min(p), hi.max(p))
            });
        let ratio = if n == 0 { 1.0 } else { max_pivot / min_pivot };
        if !(ratio <= SINGULAR_PIVOT_RATIO) {
            return Err(LinalgError::Singular {
                condition_estimate: ratio,
            });
        }
        Ok(LuFactors {
            n,
            lu: a,
            perm,
            pivot_ratio: ratio,
        })
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Packed LU factors: unit-lower L below the diagonal, U on and above it.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    pivot_ratio: f64,
}

impl LuFactors {
    /// max|u_kk| / min|u_kk|, a cheap lower bound on the condition number.
    pub fn pivot_ratio(&self) -> f64 {
        self.pivot_ratio
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
        let n = self.n;
        if rhs.len() != n {
            return Err(LinalgError::Dimension {
                matrix: n,
                vector: rhs.len(),
            });
        }
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| rhs[p]).collect();
        let zero = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let (solved, rest) = x.split_at_mut(i);
            let row = &self.lu[i * n..i * n + i];
            for (l, xk) in row.iter().zip(solved.iter()) {
                if *l != zero {
                    rest[0] -= l * xk;
                }
            }
        }
        for i in (0..n).rev() {
            let (head, solved) = x.split_at_mut(i + 1);
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            let mut acc = head[i];
            for (u, xk) in row.iter().zip(solved.iter()) {
                if *u != zero {
                    acc -= u * xk;
                }
            }
            head[i] = acc / self.lu[i * n + i];
        }
        Ok(x)
    }
}

/// ‖Mx − b‖∞ / (‖M‖∞‖x‖∞ + ‖b‖∞).
pub fn relative_residual(m: &DenseMatrix, x: &[Complex64], b: &[Complex64]) -> f64 {
    let mx = m.mul_vec(x);
    let r = mx
        .iter()
        .zip(b)
        .map(|(a, c)| (a - c).norm())
        .fold(0.0, f64::max);
    let xn = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let bn = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = m.norm_inf() * xn + bn;
    if scale == 0.0 {
        r
    } else {
        r / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn solves_small_complex_system() {
        let mut m = DenseMatrix::zeros(2);
        m[(0, 0)] = c(1.0, 1.0);
        m[(0, 1)] = c(2.0, 0.0);
        m[(1, 0)] = c(0.0, 1.0);
        m[(1, 1)] = c(3.0, -1.0);
        let x_true = [c(0.5, -2.0), c(-1.0, 0.25)];
        let b = m.mul_vec(&x_true);
        let x = m.clone().lu().unwrap().solve(&b).unwrap();
        for (got, want) in x.iter().zip(&x_true) {
            assert!((got - want).norm() < 1e-14);
        }
        assert!(relative_residual(&m, &x, &b) < 1e-15);
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let mut m = DenseMatrix::zeros(3);
        m[(0, 1)] = c(1.0, 0.0);
        m[(1, 0)] = c(2.0, 0.0);
        m[(2, 2)] = c(0.0, -1.0);
        let b = [c(1.0, 0.0), c(4.0, 0.0), c(0.0, 3.0)];
        let x = m.lu().unwrap().solve(&b).unwrap();
        assert_eq!(x, vec![c(2.0, 0.0), c(1.0, 0.0), c(-3.0, 0.0)]);
    }

    #[test]
    fn zero_column_is_singular() {
        let mut m = DenseMatrix::zeros(2);
        m[(0, 0)] = c(1.0, 0.0);
        m[(1, 0)] = c(1.0, 0.0);
        assert_eq!(
            m.lu().unwrap_err(),
            LinalgError::Singular {
                condition_estimate: f64::INFINITY
            }
        );
    }

    #[test]
    fn rhs_length_checked() {
        let mut m = DenseMatrix::zeros(2);
        m[(0, 0)] = c(1.0, 0.0);
        m[(1, 1)] = c(1.0, 0.0);
        let lu = m.lu().unwrap();
        assert!(matches!(
            lu.solve(&[c(1.0, 0.0)]),
            Err(LinalgError::Dimension { .. })
        ));
    }
}
