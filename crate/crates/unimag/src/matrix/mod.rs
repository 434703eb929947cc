//! Dense complex matrix arithmetic and the matrix functions (exp, log,
//! square root, inverse, polar) that every other module consumes.
//!
//! Matrices are immutable values once constructed; all operations are pure
//! functions of their inputs. Supported dimensions are small and dense
//! (dim ≤ 64); the constructions downstream (square roots, polar factors)
//! destroy sparsity anyway.

mod expm;
mod inv;
mod jacobi;
mod logm;
mod sqrtm;
#[cfg(test)]
pub(crate) mod test_support;

pub use expm::expm;
pub use inv::{inv, solve};
pub use jacobi::{eigh, singular_values};
pub use logm::logm;
pub use sqrtm::sqrtm_pd;

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use thiserror::Error;

/// Largest supported matrix dimension; the kernels are dense and unblocked.
pub const MAX_DIM: usize = 64;

/// Errors raised by the matrix kernels.
#[derive(Debug, Clone, Error)]
pub enum MatrixError {
    #[error("matrix is singular (pivot magnitude {pivot:.3e} at column {col})")]
    Singular { pivot: f64, col: usize },
    #[error("matrix is ill-conditioned (condition estimate {cond:.3e} exceeds cap {cap:.3e})")]
    IllConditioned { cond: f64, cap: f64 },
    #[error("matrix is not Hermitian to tolerance (defect {defect:.3e}, allowed {allowed:.3e})")]
    NotHermitian { defect: f64, allowed: f64 },
    #[error("matrix is not positive definite (min eigenvalue {min_eig:.3e})")]
    NotPositiveDefinite { min_eig: f64 },
    #[error("eigenvalue on the closed negative real axis: principal logarithm undefined")]
    SpectrumOnBranchCut,
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
}

/// Dense square complex matrix. The universal carrier for Hamiltonians,
/// propagators, normalizers and generator samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    data: Array2<C64>,
}

impl ComplexMatrix {
    /// Wrap a square array with finite entries.
    pub fn new(data: Array2<C64>) -> Result<Self, MatrixError> {
        let (rows, cols) = data.dim();
        if rows != cols {
            return Err(MatrixError::NotSquare { rows, cols });
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(MatrixError::NonFinite);
        }
        Ok(Self { data })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: Array2::zeros((dim, dim)),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            data: Array2::eye(dim),
        }
    }

    /// Build from a row-major nested slice of entries.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self, MatrixError> {
        let n = rows.len();
        let mut data = Array2::zeros((n, n));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(MatrixError::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            for (j, z) in row.iter().enumerate() {
                data[[i, j]] = *z;
            }
        }
        Self::new(data)
    }

    /// Build entrywise from an index function.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        Self {
            data: Array2::from_shape_fn((dim, dim), |(i, j)| f(i, j)),
        }
    }

    /// Diagonal matrix from complex entries.
    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, z) in diag.iter().enumerate() {
            m.data[[i, i]] = *z;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn array(&self) -> &Array2<C64> {
        &self.data
    }

    pub fn into_array(self) -> Array2<C64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[[i, j]]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, z: C64) {
        self.data[[i, j]] = z;
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim();
        Self::from_fn(n, |i, j| self.data[[j, i]].conj())
    }

    /// Frobenius norm, `sqrt(sum |a_ij|^2)`.
    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum (operator 1-norm).
    pub fn one_norm(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|j| (0..n).map(|i| self.data[[i, j]].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Hermiticity defect `||A - A'||_F`.
    pub fn hermiticity_defect(&self) -> f64 {
        (self - &self.adjoint()).fro_norm()
    }

    /// Scale-invariant Hermiticity check: defect ≤ tol · max(1, ||A||_F).
    pub fn is_hermitian_tol(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol * self.fro_norm().max(1.0)
    }

    /// Hermitian part `(A + A')/2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale(C64::new(0.5, 0.0))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            data: self.data.mapv(|z| z * c),
        }
    }

    pub fn scale_re(&self, x: f64) -> Self {
        self.scale(C64::new(x, 0.0))
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &Array1<C64>) -> Array1<C64> {
        assert_eq!(self.dim(), v.len(), "matrix/vector dimension mismatch");
        self.data.dot(v)
    }

    pub fn trace(&self) -> C64 {
        self.data.diag().iter().sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Commutator `[A, B] = AB - BA`. Panics on dimension mismatch.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(a.dim(), b.dim(), "commutator dimension mismatch");
    &(a * b) - &(b * a)
}

impl std::ops::Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "matrix addition dimension mismatch");
        ComplexMatrix {
            data: &self.data + &rhs.data,
        }
    }
}

impl std::ops::Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.dim(),
            rhs.dim(),
            "matrix subtraction dimension mismatch"
        );
        ComplexMatrix {
            data: &self.data - &rhs.data,
        }
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "matrix product dimension mismatch");
        ComplexMatrix {
            data: self.data.dot(&rhs.data),
        }
    }
}

impl std::ops::Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix {
            data: self.data.mapv(|z| -z),
        }
    }
}
