//! Principal matrix logarithm by inverse scaling-and-squaring.
//!
//! Square roots are taken with the Denman–Beavers iteration until the
//! argument is close to the identity, where a truncated Mercator series
//! finishes the job. Used as a test oracle (BCH verification), never in the
//! production propagator paths.

use super::inv::inv_capped;
use super::{ComplexMatrix, MatrixError};

const DB_MAX_ITERS: usize = 100;
const ISS_MAX_ROOTS: usize = 40;
/// Take square roots until ||X - I||_1 falls below this.
const NEAR_IDENTITY: f64 = 0.03;
const SERIES_TERMS: usize = 20;

/// One Denman–Beavers square root: `Y -> A^(1/2)`.
///
/// Converges for matrices with no eigenvalue on the closed negative real
/// axis; non-convergence or a singular iterate is reported as a branch-cut
/// failure.
fn db_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix, MatrixError> {
    let n = a.dim();
    let mut y = a.clone();
    let mut z = ComplexMatrix::identity(n);
    for _ in 0..DB_MAX_ITERS {
        let zi = inv_capped(&z, 1e14).map_err(|_| MatrixError::SpectrumOnBranchCut)?;
        let yi = inv_capped(&y, 1e14).map_err(|_| MatrixError::SpectrumOnBranchCut)?;
        let y_next = (&y + &zi).scale_re(0.5);
        let z_next = (&z + &yi).scale_re(0.5);
        let step = (&y_next - &y).fro_norm();
        y = y_next;
        z = z_next;
        if step <= 1e-14 * y.fro_norm().max(1.0) {
            return Ok(y);
        }
    }
    Err(MatrixError::SpectrumOnBranchCut)
}

/// Principal logarithm: `expm(logm(A)) = A` for spectra off `(-inf, 0]`.
pub fn logm(a: &ComplexMatrix) -> Result<ComplexMatrix, MatrixError> {
    if !a.is_finite() {
        return Err(MatrixError::NonFinite);
    }
    let n = a.dim();
    let eye = ComplexMatrix::identity(n);
    let mut x = a.clone();
    let mut roots = 0usize;
    while (&x - &eye).one_norm() > NEAR_IDENTITY {
        if roots >= ISS_MAX_ROOTS {
            return Err(MatrixError::SpectrumOnBranchCut);
        }
        x = db_sqrt(&x)?;
        roots += 1;
    }
    // log(I + E) by the Mercator series, Horner form
    let e = &x - &eye;
    let mut acc = ComplexMatrix::zeros(n);
    for j in (1..=SERIES_TERMS).rev() {
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        acc = &(&e * &acc) + &e.scale_re(sign / j as f64);
    }
    Ok(acc.scale_re(2f64.powi(roots as i32)))
}
