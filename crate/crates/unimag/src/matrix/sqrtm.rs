//! Positive-definite matrix square root via Hermitian eigendecomposition.

use num_complex::Complex64 as C64;

use super::jacobi::eigh;
use super::{ComplexMatrix, MatrixError};

/// Hermiticity tolerance: defect ≤ 1e-10 · max(1, ||A||_F).
const HERM_TOL: f64 = 1e-10;

/// The unique Hermitian positive-definite `S` with `S^2 = A`.
///
/// The input must be Hermitian to tolerance and positive definite; it is
/// symmetrized as `(A + A')/2` before decomposing.
pub fn sqrtm_pd(a: &ComplexMatrix) -> Result<ComplexMatrix, MatrixError> {
    let defect = a.hermiticity_defect();
    let allowed = HERM_TOL * a.fro_norm().max(1.0);
    if defect > allowed {
        return Err(MatrixError::NotHermitian { defect, allowed });
    }
    let s = a.hermitian_part();
    let (w, v) = eigh(&s)?;
    let min_eig = w.first().copied().unwrap_or(0.0);
    if min_eig <= 0.0 {
        return Err(MatrixError::NotPositiveDefinite { min_eig });
    }
    let root = ComplexMatrix::from_diag(
        &w.iter()
            .map(|&x| C64::new(x.sqrt(), 0.0))
            .collect::<Vec<_>>(),
    );
    Ok((&(&v * &root) * &v.adjoint()).hermitian_part())
}
