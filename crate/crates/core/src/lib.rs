//! Core library for `naqtur`: one-shot strong-coupling qubit collisions,
//! quantum divergences, and the covariance-based lower bound on the bath
//! relative entropy, together with the Monte Carlo harness that certifies
//! the bound at scale.

pub mod collision;
pub mod divergence;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod tur;

pub use collision::{
    simulate_one, CollisionConfig, CollisionParams, CollisionRecord, SystemMode,
};
pub use divergence::{
    chi2_lambda, f_divergence_via_weights, gauss_legendre, hellinger_affinity,
    petz_f_divergence_spectral, relative_entropy, QuadratureRule, WeightFunction,
};
pub use error::{Error, Result};
pub use harness::{
    derive_seed, run, run_monte_carlo, run_saturation_hunt, run_stratified, summarize, write_csv,
    write_summary_json, ExperimentConfig, StratAxis, Strategy, SummaryStats, TaggedRecord,
};
pub use tur::{
    bound_b, bound_b_f, covariance_matrix, current_vector, f_closed, f_of_d, g_inverse, g_of_d,
    matrix_tur_check, robertson_c, s_lambda, witness_bound_integral, witness_h, BoundReport,
    ChargeSet, CovariancePair, CurrentVector, SymMatrix,
};
pub use linalg::{
    bloch_state, hermitian_eig, matrix_log_psd, matrix_sqrt_psd, partial_trace, ComplexMatrix,
    DensityMatrix, HermitianOperator, Keep, SpectralDecomposition, UnitaryOperator,
    DEFAULT_EIG_FLOOR,
};
