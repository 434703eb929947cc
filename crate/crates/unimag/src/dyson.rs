//! Time-ordered propagation: truncated Dyson series, the Dyson inverse
//! series, and the fine-substep oracle that serves as numerical ground truth
//! for the time-ordered exponential.
//!
//! Nested time-ordered integrals are computed by the recursive cumulative
//! rule `F_0 = I`, `F_k(t) = ∫ H(s) F_{k-1}(s) ds`, accumulated on the grid
//! with composite trapezoid on prefix sums. That costs O(steps · K) instead
//! of the O(steps^K) of naive nesting.

use std::collections::BTreeMap;

use ndarray::Array1;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hamiltonians::HamiltonianSpec;
use crate::matrix::{expm, ComplexMatrix};

pub const MAX_DYSON_ORDER: usize = 6;
pub const MAX_INVERSE_ORDER: usize = 4;

#[derive(Debug, Clone, Error)]
pub enum GridError {
    #[error("time window must satisfy t1 > t0, got [{t0}, {t1}]")]
    BadWindow { t0: f64, t1: f64 },
    #[error("steps must be at least 1")]
    ZeroSteps,
}

#[derive(Debug, Clone, Error)]
#[error("operator dimension {operator} does not match state dimension {state}")]
pub struct DimensionMismatch {
    pub operator: usize,
    pub state: usize,
}

/// Uniform discretization of `[t0, t1]` on which all quadrature and
/// generator densities live.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    t0: f64,
    t1: f64,
    steps: usize,
    nodes: Vec<f64>,
}

impl TimeGrid {
    pub fn new(t0: f64, t1: f64, steps: usize) -> Result<Self, GridError> {
        if !t0.is_finite() || !t1.is_finite() || t1 <= t0 {
            return Err(GridError::BadWindow { t0, t1 });
        }
        if steps == 0 {
            return Err(GridError::ZeroSteps);
        }
        let nodes = (0..=steps)
            .map(|k| {
                let f = k as f64 / steps as f64;
                t0 * (1.0 - f) + t1 * f
            })
            .collect();
        Ok(Self {
            t0,
            t1,
            steps,
            nodes,
        })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Uniform spacing `(t1 - t0) / steps`.
    pub fn spacing(&self) -> f64 {
        (self.t1 - self.t0) / self.steps as f64
    }

    /// The `steps + 1` sample times, strictly increasing from `t0` to `t1`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Same window with twice the resolution.
    pub fn refined(&self) -> Self {
        Self::new(self.t0, self.t1, self.steps * 2).expect("refinement preserves validity")
    }
}

/// Cumulative trapezoid of matrix samples on a uniform grid: entry `k` is
/// the integral from the first node up to node `k`.
pub(crate) fn prefix_trapezoid(samples: &[ComplexMatrix], h: f64) -> Vec<ComplexMatrix> {
    let dim = samples[0].dim();
    let mut out = Vec::with_capacity(samples.len());
    let mut acc = ComplexMatrix::zeros(dim);
    out.push(acc.clone());
    for k in 1..samples.len() {
        acc = &acc + &(&samples[k - 1] + &samples[k]).scale_re(0.5 * h);
        out.push(acc.clone());
    }
    out
}

/// Full-window trapezoid of matrix samples on a uniform grid.
pub(crate) fn trapezoid(samples: &[ComplexMatrix], h: f64) -> ComplexMatrix {
    let dim = samples[0].dim();
    let mut acc = ComplexMatrix::zeros(dim);
    for k in 1..samples.len() {
        acc = &acc + &(&samples[k - 1] + &samples[k]).scale_re(0.5 * h);
    }
    acc
}

pub(crate) fn sample_hamiltonian(h: &HamiltonianSpec, grid: &TimeGrid) -> Vec<ComplexMatrix> {
    grid.nodes().iter().map(|&t| h.at(t)).collect()
}

/// Truncated Dyson series at every grid node:
/// `U_K(t) = Σ_{k=0..K} (-i)^k F_k(t)`.
pub(crate) fn dyson_series_nodes(
    h: &HamiltonianSpec,
    grid: &TimeGrid,
    order: usize,
) -> Vec<ComplexMatrix> {
    assert!(
        order <= MAX_DYSON_ORDER,
        "Dyson order capped at {MAX_DYSON_ORDER}"
    );
    let hs = sample_hamiltonian(h, grid);
    let n = hs.len();
    let dim = h.dim();
    let dt = grid.spacing();
    let mut u: Vec<ComplexMatrix> = vec![ComplexMatrix::identity(dim); n];
    let mut f_prev: Vec<ComplexMatrix> = vec![ComplexMatrix::identity(dim); n];
    let mut coeff = C64::new(1.0, 0.0);
    for _ in 1..=order {
        coeff *= C64::new(0.0, -1.0);
        let integrand: Vec<ComplexMatrix> = hs
            .iter()
            .zip(f_prev.iter())
            .map(|(hk, fk)| hk * fk)
            .collect();
        f_prev = prefix_trapezoid(&integrand, dt);
        for (uk, fk) in u.iter_mut().zip(f_prev.iter()) {
            *uk = &*uk + &fk.scale(coeff);
        }
    }
    u
}

/// Truncated Dyson series for the full window; `K = 0` returns the identity.
pub fn dyson_series(h: &HamiltonianSpec, grid: &TimeGrid, order: usize) -> ComplexMatrix {
    dyson_series_nodes(h, grid, order)
        .pop()
        .expect("grid has at least one node")
}

/// Order-K truncation of the inverse propagator (the anti-time-ordered
/// exponential of `+iH`): `Σ_{k=0..K} i^k G_k(t1)` with
/// `G_k(t) = ∫ G_{k-1}(s) H(s) ds`.
pub fn dyson_inverse_series(h: &HamiltonianSpec, grid: &TimeGrid, order: usize) -> ComplexMatrix {
    assert!(
        order <= MAX_INVERSE_ORDER,
        "inverse order capped at {MAX_INVERSE_ORDER}"
    );
    let hs = sample_hamiltonian(h, grid);
    let n = hs.len();
    let dim = h.dim();
    let dt = grid.spacing();
    let mut u = ComplexMatrix::identity(dim);
    let mut g_prev: Vec<ComplexMatrix> = vec![ComplexMatrix::identity(dim); n];
    let mut coeff = C64::new(1.0, 0.0);
    for _ in 1..=order {
        coeff *= C64::new(0.0, 1.0);
        let integrand: Vec<ComplexMatrix> = g_prev
            .iter()
            .zip(hs.iter())
            .map(|(gk, hk)| gk * hk)
            .collect();
        g_prev = prefix_trapezoid(&integrand, dt);
        u = &u + &g_prev[n - 1].scale(coeff);
    }
    u
}

/// Ground-truth propagator snapshots at every node: the ordered product of
/// cell exponentials `expm(-i h H(t_mid))`, rightmost factor earliest.
pub(crate) fn oracle_nodes(h: &HamiltonianSpec, grid: &TimeGrid) -> Vec<ComplexMatrix> {
    let dim = h.dim();
    let dt = grid.spacing();
    let nodes = grid.nodes();
    let mut snapshots = Vec::with_capacity(nodes.len());
    let mut u = ComplexMatrix::identity(dim);
    snapshots.push(u.clone());
    for k in 0..grid.steps() {
        let mid = 0.5 * (nodes[k] + nodes[k + 1]);
        let cell = expm(&h.at(mid).scale(C64::new(0.0, -dt)));
        u = &cell * &u;
        snapshots.push(u.clone());
    }
    snapshots
}

/// Ground-truth propagator over the window; global error O(h^2) in the grid
/// spacing.
pub fn oracle_propagator(h: &HamiltonianSpec, grid: &TimeGrid) -> ComplexMatrix {
    oracle_nodes(h, grid)
        .pop()
        .expect("grid has at least one node")
}

/// Richardson refinement of the oracle: runs at `h` and `h/2` and
/// extrapolates, `(4 U_{h/2} - U_h) / 3`, for callers needing tighter truth.
pub fn oracle_propagator_refined(h: &HamiltonianSpec, grid: &TimeGrid) -> ComplexMatrix {
    let coarse = oracle_propagator(h, grid);
    let fine = oracle_propagator(h, &grid.refined());
    (&fine.scale_re(4.0) - &coarse).scale_re(1.0 / 3.0)
}

/// Apply a propagator to a state. The state is expected normalized; when the
/// operator is unitary to defect δ the output norm is 1 ± δ.
pub fn evolve_state(
    op: &ComplexMatrix,
    psi0: &Array1<C64>,
) -> Result<Array1<C64>, DimensionMismatch> {
    if op.dim() != psi0.len() {
        return Err(DimensionMismatch {
            operator: op.dim(),
            state: psi0.len(),
        });
    }
    Ok(op.apply(psi0))
}

pub fn state_norm(psi: &Array1<C64>) -> f64 {
    psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Propagation method tags, as exposed by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Dyson,
    Magnus,
    UnitarizedExact,
    UnitarizedSeries,
    Oracle,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::Dyson => "dyson",
            Method::Magnus => "magnus",
            Method::UnitarizedExact => "unitarized_exact",
            Method::UnitarizedSeries => "unitarized_series",
            Method::Oracle => "oracle",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dyson" => Ok(Method::Dyson),
            "magnus" => Ok(Method::Magnus),
            "unitarized_exact" => Ok(Method::UnitarizedExact),
            "unitarized_series" => Ok(Method::UnitarizedSeries),
            "oracle" => Ok(Method::Oracle),
            other => Err(format!(
                "unknown method '{other}' (expected dyson, magnus, unitarized_exact, unitarized_series or oracle)"
            )),
        }
    }
}

/// Bundle of a propagation: the raw propagator `U`, the normalizer `N`
/// (identity when not computed), the revised propagator `P` (equals `U` when
/// not computed), and diagnostic scalars.
#[derive(Debug, Clone)]
pub struct PropagationResult {
    pub u: ComplexMatrix,
    pub n: ComplexMatrix,
    pub p: ComplexMatrix,
    pub unitarity_defect: f64,
    pub method: Method,
    pub diagnostics: BTreeMap<String, f64>,
}

impl PropagationResult {
    pub fn from_u(u: ComplexMatrix, method: Method) -> Self {
        let n = ComplexMatrix::identity(u.dim());
        Self::from_parts(u.clone(), n, u, method)
    }

    pub fn from_parts(
        u: ComplexMatrix,
        n: ComplexMatrix,
        p: ComplexMatrix,
        method: Method,
    ) -> Self {
        let unitarity_defect = unitarity_defect(&p);
        Self {
            u,
            n,
            p,
            unitarity_defect,
            method,
            diagnostics: BTreeMap::new(),
        }
    }
}

/// `||P' P - I||_F`, the artifact's primary correctness scalar.
pub fn unitarity_defect(p: &ComplexMatrix) -> f64 {
    (&(&p.adjoint() * p) - &ComplexMatrix::identity(p.dim())).fro_norm()
}
