//! Time-dependent Hamiltonian specifications, the Hermitian/anti-Hermitian
//! split, normality diagnostics, and the generalized Hatano–Nelson builder.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dyson::TimeGrid;
use crate::matrix::{commutator, ComplexMatrix};

#[derive(Debug, Clone, Error)]
pub enum HamiltonianError {
    #[error("field {field}: expected {expected} entries, got {got}")]
    LengthMismatch {
        field: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("lattice size must be at least 2, got {0}")]
    LatticeTooSmall(usize),
    #[error(
        "norm_bound {bound:.6e} is below the sampled max norm {sampled:.6e} on the time window"
    )]
    NormBoundViolated { bound: f64, sampled: f64 },
    #[error("evaluate({t}) produced a non-finite or wrongly sized matrix")]
    BadEvaluation { t: f64 },
}

/// Time profile of the seeded random fixtures: `H(t) = A`, `A + tB`, or
/// `A + sin(t) B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeProfile {
    Constant,
    Polynomial,
    Trigonometric,
}

/// A time-to-matrix function with dimension and norm-bound metadata.
///
/// Evaluation must be a pure function of `t`; specs are shareable across
/// concurrent evaluations.
#[derive(Clone)]
pub struct HamiltonianSpec {
    dim: usize,
    norm_bound: f64,
    eval: Arc<dyn Fn(f64) -> ComplexMatrix + Send + Sync>,
}

impl std::fmt::Debug for HamiltonianSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HamiltonianSpec")
            .field("dim", &self.dim)
            .field("norm_bound", &self.norm_bound)
            .finish_non_exhaustive()
    }
}

impl HamiltonianSpec {
    pub fn new(
        dim: usize,
        norm_bound: f64,
        eval: impl Fn(f64) -> ComplexMatrix + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            norm_bound,
            eval: Arc::new(eval),
        }
    }

    /// A Hamiltonian that does not depend on time.
    pub fn constant(h: ComplexMatrix) -> Self {
        let dim = h.dim();
        let bound = h.fro_norm();
        Self::new(dim, bound, move |_| h.clone())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    /// Evaluate `H(t)`.
    pub fn at(&self, t: f64) -> ComplexMatrix {
        let h = (self.eval)(t);
        debug_assert_eq!(h.dim(), self.dim, "evaluate(t) dimension drifted");
        h
    }

    /// Validate the spec against a grid: every sample must be finite, of the
    /// declared dimension, and within the declared norm bound.
    pub fn validate_on(&self, grid: &TimeGrid) -> Result<(), HamiltonianError> {
        let mut max_norm: f64 = 0.0;
        for &t in grid.nodes() {
            let h = (self.eval)(t);
            if h.dim() != self.dim || !h.is_finite() {
                return Err(HamiltonianError::BadEvaluation { t });
            }
            max_norm = max_norm.max(h.fro_norm());
        }
        if self.norm_bound < max_norm {
            return Err(HamiltonianError::NormBoundViolated {
                bound: self.norm_bound,
                sampled: max_norm,
            });
        }
        Ok(())
    }

    /// Copy of the spec with the norm bound replaced by a grid-sampled value.
    pub fn with_sampled_bound(&self, grid: &TimeGrid) -> Self {
        let max_norm = grid
            .nodes()
            .iter()
            .map(|&t| (self.eval)(t).fro_norm())
            .fold(0.0, f64::max);
        Self {
            dim: self.dim,
            norm_bound: max_norm,
            eval: Arc::clone(&self.eval),
        }
    }
}

/// Hermitian/anti-Hermitian split `H = Hc + iJ` with both parts Hermitian:
/// `Hc = (H + H')/2`, `J = (H - H')/(2i)`.
pub fn split(h: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let adj = h.adjoint();
    let hc = (h + &adj).scale(C64::new(0.5, 0.0));
    // (H - H')/(2i) = -i/2 (H - H')
    let j = (h - &adj).scale(C64::new(0.0, -0.5));
    (hc, j)
}

/// `||[Hc, J]||_F`; zero exactly when `H` is normal.
pub fn normality_defect(h: &ComplexMatrix) -> f64 {
    let (hc, j) = split(h);
    commutator(&hc, &j).fro_norm()
}

/// Generalized Hatano–Nelson lattice: `l` sites, hopping constants `tau`
/// (time-independent) and asymmetry functions `gamma` (time-dependent), one
/// per bond.
#[derive(Clone)]
pub struct HatanoNelsonSpec {
    pub l: usize,
    pub tau: Vec<f64>,
    pub gamma: Vec<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
}

impl HatanoNelsonSpec {
    /// Constant asymmetries, one value per bond.
    pub fn with_constant_gamma(l: usize, tau: Vec<f64>, gamma: Vec<f64>) -> Self {
        let gamma = gamma
            .into_iter()
            .map(|g| Arc::new(move |_: f64| g) as Arc<dyn Fn(f64) -> f64 + Send + Sync>)
            .collect();
        Self { l, tau, gamma }
    }
}

/// Single-particle hopping matrix of the Hatano–Nelson model:
/// `M[i, i+1] = tau_i - gamma_i(t)` and `M[i+1, i] = tau_i + gamma_i(t)`
/// on the two off-diagonals, zero elsewhere.
pub fn build_hatano_nelson(spec: &HatanoNelsonSpec) -> Result<HamiltonianSpec, HamiltonianError> {
    let l = spec.l;
    if l < 2 {
        return Err(HamiltonianError::LatticeTooSmall(l));
    }
    if spec.tau.len() != l - 1 {
        return Err(HamiltonianError::LengthMismatch {
            field: "tau",
            expected: l - 1,
            got: spec.tau.len(),
        });
    }
    if spec.gamma.len() != l - 1 {
        return Err(HamiltonianError::LengthMismatch {
            field: "gamma",
            expected: l - 1,
            got: spec.gamma.len(),
        });
    }
    let tau = spec.tau.clone();
    let gamma = spec.gamma.clone();
    // crude but safe norm bound: the entries are tau_i -+ gamma_i(t), and the
    // actual bound is refined by sampling at load time
    let bound = f64::INFINITY;
    Ok(HamiltonianSpec::new(l, bound, move |t| {
        let mut m = ComplexMatrix::zeros(l);
        for i in 0..l - 1 {
            let g = gamma[i](t);
            m.set(i, i + 1, C64::new(tau[i] - g, 0.0));
            m.set(i + 1, i, C64::new(tau[i] + g, 0.0));
        }
        m
    }))
}

/// Deterministic random fixture with `||H(t)||_F` at most `bound` over the
/// canonical window `[0, 1]` (and over all of `R` for the trigonometric
/// profile, since `max_s ||A + sB||` over `s` in `[-1, 1]` is attained at an
/// endpoint).
pub fn random_bounded_hamiltonian(
    dim: usize,
    bound: f64,
    seed: u64,
    profile: TimeProfile,
) -> HamiltonianSpec {
    assert!(dim >= 1 && bound > 0.0, "need dim >= 1 and bound > 0");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |_: ()| {
        ComplexMatrix::from_fn(dim, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    };
    let a = draw(());
    let b = draw(());
    // ||A + sB|| is convex in s, so the max over an interval sits at an
    // endpoint; scale both matrices to put that max just under the bound
    let target = bound * (1.0 - 1e-9);
    let (a, b, max_norm) = match profile {
        TimeProfile::Constant => {
            let m = a.fro_norm().max(f64::MIN_POSITIVE);
            (a, b, m)
        }
        TimeProfile::Polynomial => {
            let m = a
                .fro_norm()
                .max((&a + &b).fro_norm())
                .max(f64::MIN_POSITIVE);
            (a, b, m)
        }
        TimeProfile::Trigonometric => {
            let m = (&a + &b)
                .fro_norm()
                .max((&a - &b).fro_norm())
                .max(f64::MIN_POSITIVE);
            (a, b, m)
        }
    };
    let s = target / max_norm;
    let a = a.scale_re(s);
    let b = b.scale_re(s);
    HamiltonianSpec::new(dim, bound, move |t| match profile {
        TimeProfile::Constant => a.clone(),
        TimeProfile::Polynomial => &a + &b.scale_re(t),
        TimeProfile::Trigonometric => &a + &b.scale_re(t.sin()),
    })
}
