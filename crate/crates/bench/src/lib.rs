//! Deterministic fixtures shared by the benchmarks.

use naqtur_core::linalg::matrix::ComplexMatrix;
use naqtur_core::linalg::random::{complex_normal, unit_sphere};
use naqtur_core::linalg::states::{bloch_state, DensityMatrix, HermitianOperator};
use naqtur_core::linalg::uniform;
use naqtur_core::tur::{CurrentVector, SymMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_hermitian(dim: usize, seed: u64) -> HermitianOperator {
    let mut rng = rng(seed);
    HermitianOperator::new(ComplexMatrix::from_fn(dim, |_, _| complex_normal(&mut rng)).hermitize())
        .unwrap()
}

pub fn state_pair(seed: u64) -> (DensityMatrix, DensityMatrix) {
    let mut rng = rng(seed);
    (
        bloch_state(uniform(&mut rng, 0.1, 0.95), unit_sphere(&mut rng)).unwrap(),
        bloch_state(uniform(&mut rng, 0.1, 0.95), unit_sphere(&mut rng)).unwrap(),
    )
}

pub fn bound_inputs() -> (CurrentVector, SymMatrix, SymMatrix) {
    (
        CurrentVector::new(vec![0.07, -0.12]),
        SymMatrix::from_rows_symmetrized(&[vec![0.25, 0.03], vec![0.03, 0.2]]),
        SymMatrix::from_rows_symmetrized(&[vec![0.22, -0.05], vec![-0.05, 0.24]]),
    )
}
