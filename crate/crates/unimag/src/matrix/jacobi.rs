//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Plane rotations with a complex phase annihilate one off-diagonal pair at
//! a time; sweeps repeat until the off-diagonal mass is at roundoff. At the
//! supported dimensions (≤ 64) this is robust and accurate to ~1e-14.

use num_complex::Complex64 as C64;

use super::{ComplexMatrix, MatrixError};

const MAX_SWEEPS: usize = 50;

/// Eigendecomposition `A = V diag(w) V'` of a Hermitian matrix.
///
/// The input is symmetrized internally; eigenvalues come out ascending.
/// Fails only on non-finite input.
pub fn eigh(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix), MatrixError> {
    if !a.is_finite() {
        return Err(MatrixError::NonFinite);
    }
    let n = a.dim();
    let mut m = a.hermitian_part().into_array();
    let mut v = ComplexMatrix::identity(n).into_array();
    let scale = a.fro_norm().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| 2.0 * m[[p, q]].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let beta = m[[p, q]];
                let babs = beta.norm();
                if babs <= 1e-300 {
                    continue;
                }
                let phase = beta / babs;
                let alpha = m[[p, p]].re;
                let gamma = m[[q, q]].re;
                // tan(2θ) = 2|β| / (γ - α), |θ| ≤ π/4
                let tau = (gamma - alpha) / (2.0 * babs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // columns p,q of R: R_pp = c, R_pq = s e^{iφ}, R_qp = -s e^{-iφ}, R_qq = c
                let se = phase * s;
                for k in 0..n {
                    let akp = m[[k, p]];
                    let akq = m[[k, q]];
                    m[[k, p]] = akp * c - akq * se.conj();
                    m[[k, q]] = akp * se + akq * c;
                }
                for k in 0..n {
                    let apk = m[[p, k]];
                    let aqk = m[[q, k]];
                    m[[p, k]] = apk * c - aqk * se;
                    m[[q, k]] = apk * se.conj() + aqk * c;
                }
                // clean the annihilated pair and enforce real diagonal
                m[[p, q]] = C64::new(0.0, 0.0);
                m[[q, p]] = C64::new(0.0, 0.0);
                m[[p, p]] = C64::new(m[[p, p]].re, 0.0);
                m[[q, q]] = C64::new(m[[q, q]].re, 0.0);
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = vkp * c - vkq * se.conj();
                    v[[k, q]] = vkp * se + vkq * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[i, i]].re.total_cmp(&m[[j, j]].re));
    let w: Vec<f64> = order.iter().map(|&i| m[[i, i]].re).collect();
    let vs = ComplexMatrix::from_fn(n, |i, j| v[[i, order[j]]]);
    Ok((w, vs))
}

/// Singular values of a square matrix, ascending (square roots of the
/// eigenvalues of `A' A`, clamped at zero).
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>, MatrixError> {
    let (w, _) = eigh(&(&a.adjoint() * a))?;
    Ok(w.into_iter().map(|x| x.max(0.0).sqrt()).collect())
}
