//! Unitarized propagator `P = N U` by two independent routes.
//!
//! The exact route takes the inverse positive-definite square root of
//! `U U'`, which is the unitary polar factor of `U` in disguise and is
//! unitary at all times and all orders. The series route builds the
//! Hermitian generators `Ξ` (for the normalizer) and `Σ` (for the single
//! exponent form) out of the Magnus density via truncated BCH combinations.
//!
//! Both `Ξ` and `Σ` densities are realized as exact time derivatives of the
//! truncated BCH combination of the integrated generators, so integrating a
//! density back over the window reproduces the BCH series of the integrated
//! quantities to quadrature accuracy. Truncation breaks Hermiticity of `Σ`
//! at higher order; samples are symmetrized and the defect recorded.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::dyson::{oracle_nodes, trapezoid, unitarity_defect, TimeGrid};
use crate::hamiltonians::{normality_defect, split, HamiltonianSpec};
use crate::magnus::{magnus_exponent, omega_density, DensityKind, GeneratorDensity};
use crate::matrix::{commutator, expm, inv, singular_values, sqrtm_pd, ComplexMatrix, MatrixError};

/// Condition cap on `U` before exact unitarization; past this the entries
/// of `N` grow like the inverse smallest singular value and the result is
/// numerically meaningless.
pub const UNITARIZE_COND_CAP: f64 = 1e6;

#[derive(Debug, Clone, Error)]
pub enum UnitarizeError {
    #[error("propagator condition number {cond:.3e} exceeds the unitarization cap {cap:.3e}")]
    ConditionCap { cond: f64, cap: f64 },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// `N = (sqrt(U U'))^-1`: Hermitian positive definite, and equal to
/// `sqrt((U')^-1 U^-1)` whenever `U` is invertible.
pub fn normalizer_exact(u: &ComplexMatrix) -> Result<ComplexMatrix, UnitarizeError> {
    let sv = singular_values(u)?;
    let (smin, smax) = (
        sv.first().copied().unwrap_or(0.0),
        sv.last().copied().unwrap_or(0.0),
    );
    let cond = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if cond > UNITARIZE_COND_CAP {
        return Err(UnitarizeError::ConditionCap {
            cond,
            cap: UNITARIZE_COND_CAP,
        });
    }
    let gram = &(u * &u.adjoint()).hermitian_part();
    Ok(inv(&sqrtm_pd(gram)?)?)
}

/// `P = N U`, the unitary polar factor of `U`; `||P'P - I||_F ≤ 1e-10`
/// whenever the normalizer succeeded.
pub fn unitarized_propagator_exact(u: &ComplexMatrix) -> Result<ComplexMatrix, UnitarizeError> {
    Ok(&normalizer_exact(u)? * u)
}

/// Generator of the squared normalizer: `exp(∫ Ξ) = U U'` with
/// `U = exp(-i ∫ Ω)`.
///
/// The density is the time derivative of the truncated BCH combination of
/// `A(t) = -i ∫ Ω` and `A'(t)`; each truncation order is Hermitian sample by
/// sample, so the defect recorded here is roundoff-sized.
pub fn xi_density(omega: &GeneratorDensity, order: usize) -> GeneratorDensity {
    assert_eq!(
        omega.kind(),
        DensityKind::Omega,
        "xi_density expects an omega density"
    );
    assert!((1..=3).contains(&order), "BCH order must be in 1..=3");
    let minus_i = C64::new(0.0, -1.0);
    let iom = omega.prefix_exponents();
    let n = iom.len();
    let mut samples = Vec::with_capacity(n);
    let mut max_defect: f64 = 0.0;
    #[allow(clippy::needless_range_loop)]
    for k in 0..n {
        let a = iom[k].scale(minus_i);
        let ad = a.adjoint();
        let da = omega.samples()[k].scale(minus_i);
        let dad = da.adjoint();
        // d/dt (A + A')
        let mut xi = &da + &dad;
        if order >= 2 {
            // d/dt (1/2)[A, A']
            let dw = &commutator(&da, &ad) + &commutator(&a, &dad);
            xi = &xi + &dw.scale_re(0.5);
            if order >= 3 {
                // d/dt (1/12)([A, W] - [A', W]) with W = [A, A']
                let w = commutator(&a, &ad);
                let t3 = &(&commutator(&da, &w) + &commutator(&a, &dw))
                    - &(&commutator(&dad, &w) + &commutator(&ad, &dw));
                xi = &xi + &t3.scale_re(1.0 / 12.0);
            }
        }
        max_defect = max_defect.max(xi.hermiticity_defect());
        samples.push(xi.hermitian_part());
    }
    GeneratorDensity::new(omega.grid().clone(), samples, DensityKind::Xi, max_defect)
}

/// `N = exp(-(1/2) ∫ Ξ)`: Hermitian positive definite by construction.
pub fn normalizer_series(xi: &GeneratorDensity) -> ComplexMatrix {
    assert_eq!(
        xi.kind(),
        DensityKind::Xi,
        "normalizer_series expects a xi density"
    );
    let exponent = trapezoid(xi.samples(), xi.grid().spacing())
        .scale_re(-0.5)
        .hermitian_part();
    expm(&exponent).hermitian_part()
}

/// Generator of the unitarized propagator: `P = exp(-i ∫ Σ)` from the BCH
/// combination of `-(1/2) ∫ Ξ` and `-i ∫ Ω`, in density form.
///
/// Truncation genuinely breaks `Σ' = Σ` at order T^{order+1}; samples are
/// symmetrized and the worst pre-symmetrization defect recorded.
pub fn sigma_density(
    omega: &GeneratorDensity,
    xi: &GeneratorDensity,
    order: usize,
) -> GeneratorDensity {
    assert_eq!(
        omega.kind(),
        DensityKind::Omega,
        "sigma_density expects an omega density"
    );
    assert_eq!(
        xi.kind(),
        DensityKind::Xi,
        "sigma_density expects a xi density"
    );
    assert_eq!(omega.grid(), xi.grid(), "omega and xi must share a grid");
    assert!((1..=3).contains(&order), "BCH order must be in 1..=3");
    let minus_i = C64::new(0.0, -1.0);
    let i = C64::i();
    let iom = omega.prefix_exponents();
    let ixi = xi.prefix_exponents();
    let n = iom.len();
    let mut samples = Vec::with_capacity(n);
    let mut max_defect: f64 = 0.0;
    #[allow(clippy::needless_range_loop)]
    for k in 0..n {
        let x = ixi[k].scale_re(-0.5);
        let dx = xi.samples()[k].scale_re(-0.5);
        let y = iom[k].scale(minus_i);
        let dy = omega.samples()[k].scale(minus_i);
        // m = d/dt BCH(X, Y) = -i Σ
        let mut m = &dx + &dy;
        if order >= 2 {
            let dv = &commutator(&dx, &y) + &commutator(&x, &dy);
            m = &m + &dv.scale_re(0.5);
            if order >= 3 {
                let v = commutator(&x, &y);
                let t3 = &(&commutator(&dx, &v) + &commutator(&x, &dv))
                    - &(&commutator(&dy, &v) + &commutator(&y, &dv));
                m = &m + &t3.scale_re(1.0 / 12.0);
            }
        }
        let sigma = m.scale(i);
        max_defect = max_defect.max(sigma.hermiticity_defect());
        samples.push(sigma.hermitian_part());
    }
    GeneratorDensity::new(
        omega.grid().clone(),
        samples,
        DensityKind::Sigma,
        max_defect,
    )
}

/// Single-exponent series propagator `P = exp(-i ∫ Σ)`; unitary to roundoff
/// since the symmetrized `Σ` makes the exponent anti-Hermitian.
pub fn unitarized_propagator_series(sigma: &GeneratorDensity) -> ComplexMatrix {
    assert_eq!(
        sigma.kind(),
        DensityKind::Sigma,
        "unitarized_propagator_series expects a sigma density"
    );
    let exponent = trapezoid(sigma.samples(), sigma.grid().spacing()).hermitian_part();
    expm(&exponent.scale(C64::new(0.0, -1.0)))
}

/// Everything the unitarization pipeline produces for one window.
#[derive(Debug, Clone)]
pub struct UnitarizeReport {
    /// Exact-path propagator, `N_exact · U_oracle`.
    pub p_exact: ComplexMatrix,
    /// Series-path propagator, `exp(-(1/2)∫Ξ) · exp(-i∫Ω)`.
    pub p_series: ComplexMatrix,
    /// Exact-path normalizer.
    pub n: ComplexMatrix,
    pub sigma_density: GeneratorDensity,
    pub xi_density: GeneratorDensity,
    pub unitarity_defect_exact: f64,
    pub unitarity_defect_series: f64,
    /// `||P_exact - P_series||_F`.
    pub path_disagreement: f64,
    /// Backward-difference residual of `dP/dt = -i Hc P` at the window end.
    pub newschro_residual: f64,
}

/// Run both unitarization paths over a window.
///
/// The exact path unitarizes the substep-oracle propagator on the given
/// grid; the series path combines the order-`omega_order` Magnus density
/// with BCH truncations at `bch_order`.
pub fn unitarize_report(
    h: &HamiltonianSpec,
    grid: &TimeGrid,
    omega_order: usize,
    bch_order: usize,
) -> Result<UnitarizeReport, UnitarizeError> {
    let snapshots = oracle_nodes(h, grid);
    let u = snapshots.last().expect("non-empty grid").clone();
    let n = normalizer_exact(&u)?;
    let p_exact = &n * &u;

    let omega = omega_density(h, grid, omega_order);
    let xi = xi_density(&omega, bch_order);
    let sigma = sigma_density(&omega, &xi, bch_order);
    let u_magnus = expm(&magnus_exponent(&omega).scale(C64::new(0.0, -1.0)));
    let p_series = &normalizer_series(&xi) * &u_magnus;

    // residual of the unitarized Schrödinger equation at t1, from the last
    // two oracle snapshots unitarized on the same grid
    let m = snapshots.len();
    let p_prev = if m >= 2 {
        unitarized_propagator_exact(&snapshots[m - 2])?
    } else {
        ComplexMatrix::identity(h.dim())
    };
    let newschro_residual = newschro_residual(h, grid, &p_exact, &p_prev);

    Ok(UnitarizeReport {
        unitarity_defect_exact: unitarity_defect(&p_exact),
        unitarity_defect_series: unitarity_defect(&p_series),
        path_disagreement: (&p_exact - &p_series).fro_norm(),
        p_exact,
        p_series,
        n,
        sigma_density: sigma,
        xi_density: xi,
        newschro_residual,
    })
}

/// `||(P(t1) - P(t1-h))/h + i Hc(t1) P(t1)||_F`.
pub(crate) fn newschro_residual(
    h: &HamiltonianSpec,
    grid: &TimeGrid,
    p_last: &ComplexMatrix,
    p_prev: &ComplexMatrix,
) -> f64 {
    let dt = grid.spacing();
    let (hc, _) = split(&h.at(grid.t1()));
    let fd = (p_last - p_prev).scale_re(1.0 / dt);
    (&fd + &(&hc * p_last).scale(C64::i())).fro_norm()
}

/// Diagnostic scalars for a finished report: the Eq-of-motion residual, the
/// normality defect of `H(t1)`, both generator Hermiticity defects, and the
/// disagreement between the two paths.
pub fn diagnostics(
    h: &HamiltonianSpec,
    grid: &TimeGrid,
    report: &UnitarizeReport,
) -> BTreeMap<String, f64> {
    let mut map = BTreeMap::new();
    map.insert("newschro_residual".to_string(), report.newschro_residual);
    map.insert(
        "normality_defect".to_string(),
        normality_defect(&h.at(grid.t1())),
    );
    map.insert(
        "hermiticity_defect_sigma".to_string(),
        report.sigma_density.hermiticity_defect(),
    );
    map.insert(
        "hermiticity_defect_xi".to_string(),
        report.xi_density.hermiticity_defect(),
    );
    map.insert("path_disagreement".to_string(), report.path_disagreement);
    map
}
