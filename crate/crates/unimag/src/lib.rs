//! Quantum time-evolution operators for time-dependent, possibly
//! non-Hermitian Hamiltonians.
//!
//! The library builds the classic constructions — truncated Dyson series and
//! Magnus generators — alongside a unitarized propagator `P = N U`, where the
//! normalizer `N = (sqrt(U U'))^-1` restores norm preservation for
//! non-Hermitian generators. `P` is computed by two independent routes that
//! cross-validate each other:
//!
//! * an exact matrix-function path (inverse positive-definite square root of
//!   `U U'`), and
//! * a truncated-series path through the Hermitian generators `Ξ` and `Σ`,
//!   combined with the Baker–Campbell–Hausdorff series.
//!
//! The `unimag` binary exposes scenario execution (including a generalized
//! Hatano–Nelson lattice with time-dependent asymmetric hopping) with CSV or
//! JSON emission; see the crate README.

pub mod config;
pub mod dyson;
pub mod hamiltonians;
pub mod magnus;
pub mod matrix;
pub mod runner;
pub mod unitarize;

pub use dyson::{
    dyson_inverse_series, dyson_series, evolve_state, oracle_propagator, oracle_propagator_refined,
    unitarity_defect, Method, PropagationResult, TimeGrid,
};
pub use hamiltonians::{
    build_hatano_nelson, normality_defect, random_bounded_hamiltonian, split, HamiltonianSpec,
    HatanoNelsonSpec, TimeProfile,
};
pub use magnus::{bch_combine, magnus_exponent, omega_density, DensityKind, GeneratorDensity};
pub use matrix::{commutator, ComplexMatrix, MatrixError};
pub use unitarize::{
    diagnostics, normalizer_exact, normalizer_series, sigma_density, unitarize_report,
    unitarized_propagator_exact, unitarized_propagator_series, xi_density, UnitarizeReport,
};
