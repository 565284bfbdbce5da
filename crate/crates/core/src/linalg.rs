//! Dense LU factorization with partial pivoting for the hitting-time systems.

use crate::error::{Error, Result};
use crate::scalar::{from_usize, Real};

/// Row-major square matrix factorized in place as `PA = LU`.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    n: usize,
    lu: Vec<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn factor(n: usize, mut a: Vec<T>) -> Result<Self> {
        assert_eq!(a.len(), n * n, "matrix must be n×n");
        let scale = a.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let tol = T::epsilon() * scale * from_usize(n.max(1));
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let (pivot_row, pivot_abs) = (col..n)
                .map(|r| (r, a[r * n + col].abs()))
                .fold((col, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pivot_abs > tol) {
                return Err(Error::Model(format!("singular linear system (column {col})")));
            }
            if pivot_row != col {
                for k in 0..n {
                    a.swap(col * n + k, pivot_row * n + k);
                }
                perm.swap(col, pivot_row);
            }
            let pivot = a[col * n + col];
            for r in col + 1..n {
                let factor = a[r * n + col] / pivot;
                a[r * n + col] = factor;
                if factor != T::zero() {
                    for k in col + 1..n {
                        let v = a[col * n + k];
                        a[r * n + k] -= factor * v;
                    }
                }
            }
        }
        Ok(Self { n, lu: a, perm })
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            let row = &self.lu[r * n..r * n + r];
            let acc = row.iter().zip(&x[..r]).fold(x[r], |acc, (&l, &v)| acc - l * v);
            x[r] = acc;
        }
        for r in (0..n).rev() {
            let row = &self.lu[r * n + r + 1..(r + 1) * n];
            let acc = row.iter().zip(&x[r + 1..]).fold(x[r], |acc, (&u, &v)| acc - u * v);
            x[r] = acc / self.lu[r * n + r];
        }
        x
    }
}
