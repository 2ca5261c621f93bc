//! Dense complex Hermitian linear algebra and random-state generation.

pub mod eig;
pub mod matrix;
pub mod random;
pub mod states;

pub use eig::{hermitian_eig, phase_fix_columns, SpectralDecomposition};
pub use matrix::{frobenius_norm, pauli_dot, pauli_x, pauli_y, pauli_z, tensor, ComplexMatrix};
pub use random::{complex_normal, haar_su2, haar_unitary, normal_pair, uniform, unit_sphere};
pub use states::{
    bloch_state, matrix_log_psd, matrix_sqrt_psd, partial_trace, partial_trace_matrix,
    DensityMatrix, HermitianOperator, Keep, UnitaryOperator, DEFAULT_EIG_FLOOR,
};
