//! Magnus generator densities Ω₁..Ω₃, exponent assembly, and the truncated
//! Baker–Campbell–Hausdorff combiner.
//!
//! Generators are stored in density form: the propagator is
//! `expm(-i ∫ Ω(t) dt)`, with `Ω(t)` sampled per grid node. Densities are
//! chosen so that the integrated exponent reproduces the Magnus series of
//! the time-ordered exponential; in particular every `Ω_n` sample is
//! Hermitian whenever the Hamiltonian is, which keeps each truncation order
//! manifestly unitary.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::dyson::{prefix_trapezoid, sample_hamiltonian, trapezoid, TimeGrid};
use crate::hamiltonians::HamiltonianSpec;
use crate::matrix::{commutator, ComplexMatrix};

pub const MAX_OMEGA_ORDER: usize = 3;
pub const MAX_BCH_ORDER: usize = 3;

/// Soft convergence guard for the BCH series.
pub const BCH_WARN_NORM: f64 = std::f64::consts::LN_2;
/// Hard rejection threshold for the BCH series.
pub const BCH_MAX_NORM: f64 = std::f64::consts::PI;

#[derive(Debug, Clone, Error)]
pub enum MagnusError {
    #[error(
        "BCH arguments too large: ||A||_F + ||B||_F = {norm:.4} exceeds the hard cap {cap:.4}"
    )]
    NormTooLarge { norm: f64, cap: f64 },
}

/// Which generator a density samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityKind {
    Omega,
    Xi,
    Sigma,
}

/// Matrix-valued samples of a generator density on a [`TimeGrid`].
///
/// `Xi` and `Sigma` samples are Hermitian (symmetrized on construction; the
/// pre-symmetrization defect is retained for diagnostics).
#[derive(Debug, Clone)]
pub struct GeneratorDensity {
    grid: TimeGrid,
    samples: Vec<ComplexMatrix>,
    kind: DensityKind,
    hermiticity_defect: f64,
}

impl GeneratorDensity {
    pub(crate) fn new(
        grid: TimeGrid,
        samples: Vec<ComplexMatrix>,
        kind: DensityKind,
        hermiticity_defect: f64,
    ) -> Self {
        assert_eq!(
            samples.len(),
            grid.nodes().len(),
            "one sample per grid node"
        );
        Self {
            grid,
            samples,
            kind,
            hermiticity_defect,
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[ComplexMatrix] {
        &self.samples
    }

    pub fn kind(&self) -> DensityKind {
        self.kind
    }

    /// Largest pre-symmetrization Hermiticity defect across samples; zero
    /// for `Omega` densities.
    pub fn hermiticity_defect(&self) -> f64 {
        self.hermiticity_defect
    }

    pub fn dim(&self) -> usize {
        self.samples[0].dim()
    }

    /// Integrals of the density from `t0` up to every node.
    pub(crate) fn prefix_exponents(&self) -> Vec<ComplexMatrix> {
        prefix_trapezoid(&self.samples, self.grid.spacing())
    }
}

/// Magnus generator density truncated at `order` ≤ 3:
///
/// * `Ω₁(t) = H(t)`
/// * `Ω₂(t) = -(i/2) ∫ [H(t), H(t')] dt'`
/// * `Ω₃(t) = -(1/6) ∫∫ ([H(t), [H(t'), H(t'')]] + [H(t''), [H(t'), H(t)]])`
///
/// with nested domains `t'' ≤ t' ≤ t`, so that `expm(-i ∫ Ω)` matches the
/// time-ordered exponential through the kept order.
pub fn omega_density(h: &HamiltonianSpec, grid: &TimeGrid, order: usize) -> GeneratorDensity {
    assert!(
        (1..=MAX_OMEGA_ORDER).contains(&order),
        "omega order must be in 1..={MAX_OMEGA_ORDER}"
    );
    let hs = sample_hamiltonian(h, grid);
    let n = hs.len();
    let dt = grid.spacing();
    let mut samples = hs.clone();

    if order >= 2 {
        let ih = prefix_trapezoid(&hs, dt);
        let half_i = C64::new(0.0, -0.5);
        for k in 0..n {
            let c = commutator(&hs[k], &ih[k]);
            samples[k] = &samples[k] + &c.scale(half_i);
        }
        if order >= 3 {
            // first piece: [H(t), K(t)] with K = ∫ [H(s), I_H(s)] ds
            let inner: Vec<ComplexMatrix> = hs
                .iter()
                .zip(ih.iter())
                .map(|(hk, ik)| commutator(hk, ik))
                .collect();
            let kpref = prefix_trapezoid(&inner, dt);
            // second piece needs the outer-time Hamiltonian inside the
            // integrand, so it pays one inner quadrature per node
            for k in 0..n {
                let piece1 = commutator(&hs[k], &kpref[k]);
                let mut piece2 = ComplexMatrix::zeros(h.dim());
                if k > 0 {
                    let f = |j: usize| commutator(&ih[j], &commutator(&hs[j], &hs[k]));
                    let mut prev = f(0);
                    for j in 1..=k {
                        let cur = f(j);
                        piece2 = &piece2 + &(&prev + &cur).scale_re(0.5 * dt);
                        prev = cur;
                    }
                }
                samples[k] = &samples[k] + &(&piece1 + &piece2).scale_re(-1.0 / 6.0);
            }
        }
    }
    GeneratorDensity::new(grid.clone(), samples, DensityKind::Omega, 0.0)
}

/// Integral of a density over its full window; the propagator associated
/// with an Ω exponent `E` is `expm(-i E)`.
pub fn magnus_exponent(density: &GeneratorDensity) -> ComplexMatrix {
    trapezoid(density.samples(), density.grid().spacing())
}

/// Truncated BCH combination `C = log(exp A exp B)`:
/// `C = A + B + (1/2)[A,B] + (1/12)[A,[A,B]] - (1/12)[B,[A,B]]`.
///
/// Arguments with `||A||_F + ||B||_F` above ln 2 are outside the guaranteed
/// convergence region and only logged; above π they are rejected.
pub fn bch_combine(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    order: usize,
) -> Result<ComplexMatrix, MagnusError> {
    assert!(
        (1..=MAX_BCH_ORDER).contains(&order),
        "BCH order must be in 1..={MAX_BCH_ORDER}"
    );
    assert_eq!(a.dim(), b.dim(), "BCH dimension mismatch");
    let norm = a.fro_norm() + b.fro_norm();
    if norm > BCH_MAX_NORM {
        return Err(MagnusError::NormTooLarge {
            norm,
            cap: BCH_MAX_NORM,
        });
    }
    if norm > BCH_WARN_NORM {
        log::warn!(
            "BCH arguments have ||A||_F + ||B||_F = {norm:.4} > ln 2; the truncated series may be inaccurate"
        );
    }
    let mut c = a + b;
    if order >= 2 {
        let w = commutator(a, b);
        c = &c + &w.scale_re(0.5);
        if order >= 3 {
            let awa = commutator(a, &w);
            let bwb = commutator(b, &w);
            c = &c + &(&awa - &bwb).scale_re(1.0 / 12.0);
        }
    }
    Ok(c)
}
