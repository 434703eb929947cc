//! LU factorization with partial pivoting, inverse and linear solves.

// index-style elimination: the loops walk several parallel buffers at once
#![allow(clippy::needless_range_loop)]

use num_complex::Complex64 as C64;

use super::{ComplexMatrix, MatrixError};

/// Default cap on the Frobenius condition estimate for [`inv`].
pub(crate) const COND_CAP: f64 = 1e12;

struct Lu {
    /// Packed L (unit lower) and U factors.
    lu: Vec<C64>,
    perm: Vec<usize>,
    n: usize,
}

fn factorize(a: &ComplexMatrix) -> Result<Lu, MatrixError> {
    let n = a.dim();
    let mut lu: Vec<C64> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            lu.push(a.get(i, j));
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let scale = a.fro_norm().max(1.0);
    for k in 0..n {
        let (mut p, mut best) = (k, lu[perm[k] * n + k].norm());
        for r in k + 1..n {
            let v = lu[perm[r] * n + k].norm();
            if v > best {
                p = r;
                best = v;
            }
        }
        if best <= f64::EPSILON * scale {
            return Err(MatrixError::Singular {
                pivot: best,
                col: k,
            });
        }
        perm.swap(k, p);
        let pk = perm[k];
        let piv = lu[pk * n + k];
        for r in k + 1..n {
            let pr = perm[r];
            let m = lu[pr * n + k] / piv;
            lu[pr * n + k] = m;
            for c in k + 1..n {
                let sub = m * lu[pk * n + c];
                lu[pr * n + c] -= sub;
            }
        }
    }
    Ok(Lu { lu, perm, n })
}

impl Lu {
    fn solve_vec(&self, b: &[C64], x: &mut [C64]) {
        let n = self.n;
        // forward substitution with the permuted rows
        for i in 0..n {
            let mut s = b[self.perm[i]];
            for j in 0..i {
                s -= self.lu[self.perm[i] * n + j] * x[j];
            }
            x[i] = s;
        }
        // back substitution
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[self.perm[i] * n + j] * x[j];
            }
            x[i] = s / self.lu[self.perm[i] * n + i];
        }
    }
}

/// Solve `A X = B` for square `A`.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, MatrixError> {
    assert_eq!(a.dim(), b.dim(), "solve dimension mismatch");
    let lu = factorize(a)?;
    let n = a.dim();
    let mut x = ComplexMatrix::zeros(n);
    let mut col = vec![C64::new(0.0, 0.0); n];
    let mut sol = vec![C64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = b.get(i, j);
        }
        lu.solve_vec(&col, &mut sol);
        for i in 0..n {
            x.set(i, j, sol[i]);
        }
    }
    Ok(x)
}

/// Matrix inverse with a condition-number guard.
///
/// The condition estimate is `||A||_F ||A^-1||_F`; values above the cap
/// (1e12) are rejected rather than returning digits that are mostly noise.
pub fn inv(a: &ComplexMatrix) -> Result<ComplexMatrix, MatrixError> {
    inv_capped(a, COND_CAP)
}

pub(crate) fn inv_capped(a: &ComplexMatrix, cap: f64) -> Result<ComplexMatrix, MatrixError> {
    let x = solve(a, &ComplexMatrix::identity(a.dim()))?;
    let cond = a.fro_norm() * x.fro_norm();
    if cond > cap {
        return Err(MatrixError::IllConditioned { cond, cap });
    }
    Ok(x)
}
