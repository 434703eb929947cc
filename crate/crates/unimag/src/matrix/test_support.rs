//! Seeded fixtures and nalgebra conversions shared by the matrix unit tests.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ComplexMatrix;

/// Shared tolerance for exact-arithmetic kernels.
pub const MAT_TOL: f64 = 1e-10;

/// Entries uniform in the complex unit square, deterministic in the seed.
pub fn random_matrix(dim: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexMatrix::from_fn(dim, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_hermitian(dim: usize, seed: u64) -> ComplexMatrix {
    random_matrix(dim, seed).hermitian_part()
}

pub fn random_vector(dim: usize, seed: u64) -> ndarray::Array1<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ndarray::Array1::from_shape_fn(dim, |_| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn to_nalgebra(a: &ComplexMatrix) -> DMatrix<C64> {
    let n = a.dim();
    DMatrix::from_fn(n, n, |i, j| a.get(i, j))
}

pub fn to_unimag(a: &DMatrix<C64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.nrows(), |i, j| a[(i, j)])
}
