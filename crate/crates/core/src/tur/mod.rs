//! Currents, covariance geometry, and the lower bound on the bath
//! relative entropy built from (dq, V, V').
//!
//! The bound needs only the charge expectation changes and the pre/post
//! covariance matrices of the measured charges. Everything here treats those
//! three ingredients as plain numerical data; the collision module produces
//! them from simulated states.

pub mod scalar;
pub mod symmat;

pub use scalar::{bound_integrand, f_closed, f_of_d, g_inverse, g_of_d, witness_h};
pub use symmat::{SymEig, SymMatrix};

use crate::divergence::QuadratureRule;
use crate::error::{Error, Result};
use crate::linalg::matrix::{pauli_dot, ComplexMatrix};
use crate::linalg::random::haar_su2;
use crate::linalg::states::{DensityMatrix, HermitianOperator};
use rand::Rng;

/// Relative eigenvalue cutoff for pseudo-inverting the interpolated
/// covariance.
pub const PINV_RELATIVE_CUTOFF: f64 = 1e-12;

/// A current component this far outside the covariance range (relative to
/// its norm) marks the record as degenerate; the bound is then reported as
/// the +inf sentinel rather than silently projected.
pub const RANGE_RESIDUAL_FLAG: f64 = 1e-8;

/// Default regulator in the Robertson incompatibility ratio.
pub const ROBERTSON_EPSILON: f64 = 1e-15;

/// PSD validation tolerance for covariance pairs.
pub const COVARIANCE_PSD_TOL: f64 = 1e-10;

/// Hermitian charge observables together with the frame that generated them.
#[derive(Debug, Clone)]
pub struct ChargeSet {
    charges: Vec<HermitianOperator>,
    frame: [[f64; 3]; 3],
    labels: Vec<String>,
}

impl ChargeSet {
    /// The default noncommuting pair (sigma_x / 2, sigma_z / 2).
    pub fn pauli_xz() -> Self {
        Self::from_frame(identity_frame())
    }

    /// Charges q_u = (e_u . sigma)/2 with e_1 = R x_hat, e_2 = R z_hat.
    pub fn from_frame(rotation: [[f64; 3]; 3]) -> Self {
        let e1 = frame_column(&rotation, 0);
        let e2 = frame_column(&rotation, 2);
        let charges = vec![charge_along(e1), charge_along(e2)];
        ChargeSet {
            charges,
            frame: rotation,
            labels: vec!["Q_1".into(), "Q_2".into()],
        }
    }

    /// Random frame from the adjoint action of a Haar SU(2) element.
    pub fn random_frame<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let u = haar_su2(rng);
        Self::from_frame(su2_to_so3(u.matrix()))
    }

    pub fn charges(&self) -> &[HermitianOperator] {
        &self.charges
    }

    pub fn frame(&self) -> &[[f64; 3]; 3] {
        &self.frame
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.charges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.charges.is_empty()
    }
}

fn identity_frame() -> [[f64; 3]; 3] {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

fn frame_column(r: &[[f64; 3]; 3], col: usize) -> [f64; 3] {
    [r[0][col], r[1][col], r[2][col]]
}

fn charge_along(e: [f64; 3]) -> HermitianOperator {
    HermitianOperator::new(pauli_dot(e).scale_re(0.5)).expect("pauli combinations are Hermitian")
}

/// Adjoint representation: U (v . sigma) U^dag = (R v) . sigma.
pub fn su2_to_so3(u: &ComplexMatrix) -> [[f64; 3]; 3] {
    let paulis = [
        crate::linalg::matrix::pauli_x(),
        crate::linalg::matrix::pauli_y(),
        crate::linalg::matrix::pauli_z(),
    ];
    let mut r = [[0.0; 3]; 3];
    let udag = u.adjoint();
    for (j, sj) in paulis.iter().enumerate() {
        let rotated = &(u * sj) * &udag;
        for (i, si) in paulis.iter().enumerate() {
            r[i][j] = 0.5 * si.trace_product_re(&rotated);
        }
    }
    r
}

/// Changes of the charge expectation values across a collision.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentVector {
    components: Vec<f64>,
}

impl CurrentVector {
    pub fn new(components: Vec<f64>) -> Self {
        CurrentVector { components }
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.components.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Pre/post covariance matrices, validated symmetric PSD.
#[derive(Debug, Clone)]
pub struct CovariancePair {
    pub v: SymMatrix,
    pub v_prime: SymMatrix,
}

impl CovariancePair {
    pub fn new(v: SymMatrix, v_prime: SymMatrix) -> Result<Self> {
        if v.dim() != v_prime.dim() {
            return Err(Error::DimensionMismatch(format!(
                "covariance pair dims {} vs {}",
                v.dim(),
                v_prime.dim()
            )));
        }
        v.check_psd(COVARIANCE_PSD_TOL)?;
        v_prime.check_psd(COVARIANCE_PSD_TOL)?;
        Ok(CovariancePair { v, v_prime })
    }

    /// ||V' - V||_F / ||V||_F.
    pub fn drift(&self) -> f64 {
        self.v_prime.sub(&self.v).frobenius_norm() / self.v.frobenius_norm()
    }
}

/// dq_u = Tr[(rho_E' - rho_E) Q_u].
pub fn current_vector(
    rho_e: &DensityMatrix,
    rho_e_prime: &DensityMatrix,
    charges: &ChargeSet,
) -> CurrentVector {
    let delta = rho_e_prime.matrix() - rho_e.matrix();
    CurrentVector::new(
        charges
            .charges()
            .iter()
            .map(|q| delta.trace_product_re(q.matrix()))
            .collect(),
    )
}

/// Symmetrized covariance V_uv = Tr[tau {dQ_u, dQ_v}] / 2 with
/// dQ_u = Q_u - <Q_u> I.
pub fn covariance_matrix(tau: &DensityMatrix, charges: &ChargeSet) -> SymMatrix {
    let m = charges.len();
    let means: Vec<f64> = charges.charges().iter().map(|q| q.expectation(tau)).collect();
    let mut rows = vec![vec![0.0; m]; m];
    for u in 0..m {
        for v in u..m {
            let anti = charges.charges()[u]
                .matrix()
                .anticommutator(charges.charges()[v].matrix());
            let raw = 0.5 * tau.matrix().trace_product_re(&anti) - means[u] * means[v];
            rows[u][v] = raw;
            rows[v][u] = raw;
        }
    }
    SymMatrix::from_rows_symmetrized(&rows)
}

/// s_lambda = dq^T V_lambda^+ dq with V_lambda = (1 - lambda) V' + lambda V.
///
/// The pseudo-inverse discards eigenvalues below `tol * lambda_max`.
/// Also returns ||(I - P_range) dq|| / max(||dq||, 1e-300).
pub fn s_lambda(
    dq: &CurrentVector,
    v: &SymMatrix,
    v_prime: &SymMatrix,
    lambda: f64,
    tol: f64,
) -> (f64, f64) {
    let v_lambda = v_prime.lincomb(1.0 - lambda, v, lambda);
    let eig = v_lambda.eig();
    let max_eig = eig.values.last().copied().unwrap_or(0.0).max(0.0);
    let cutoff = tol * max_eig;
    let (s, outside) = eig.pinv_quadratic_form(dq.components(), cutoff);
    let residual = outside / dq.norm().max(1e-300);
    (s, residual)
}

/// Everything the bound evaluation reports for one (dq, V, V') triple.
#[derive(Debug, Clone)]
pub struct BoundReport {
    /// The integral bound; +inf sentinel when the current sits outside the
    /// covariance range.
    pub bound: f64,
    /// dq^T V^+ dq on the pre-collision covariance alone.
    pub s_simple: f64,
    /// Closed form F(s_simple).
    pub f_of_s: f64,
    /// Worst range residual across quadrature nodes.
    pub range_residual: f64,
    /// Set when `range_residual > RANGE_RESIDUAL_FLAG`.
    pub out_of_range: bool,
}

/// The fully optimized integral bound
/// B(dq, V, V') = int_0^1 lambda s_lambda / (1 + lambda (1-lambda) s_lambda).
pub fn bound_b(
    dq: &CurrentVector,
    v: &SymMatrix,
    v_prime: &SymMatrix,
    quad: &QuadratureRule,
) -> BoundReport {
    let mut acc = 0.0;
    let mut worst_residual = 0.0f64;
    for (&lambda, &w) in quad.nodes().iter().zip(quad.weights()) {
        let (s, residual) = s_lambda(dq, v, v_prime, lambda, PINV_RELATIVE_CUTOFF);
        worst_residual = worst_residual.max(residual);
        acc += w * bound_integrand(lambda, s);
    }
    let (s_simple, simple_residual) = s_lambda(dq, v, v, 0.5, PINV_RELATIVE_CUTOFF);
    worst_residual = worst_residual.max(simple_residual);
    let out_of_range = worst_residual > RANGE_RESIDUAL_FLAG;
    BoundReport {
        bound: if out_of_range { f64::INFINITY } else { acc },
        s_simple,
        f_of_s: f_closed(s_simple).unwrap_or(f64::NAN),
        range_residual: worst_residual,
        out_of_range,
    }
}

/// Bound for a general decomposition weight; the KL weight reproduces
/// `bound_b`.
pub fn bound_b_f(
    dq: &CurrentVector,
    v: &SymMatrix,
    v_prime: &SymMatrix,
    weight: &crate::divergence::WeightFunction,
    quad: &QuadratureRule,
) -> f64 {
    let mut acc = 0.0;
    for (&lambda, &w) in quad.nodes().iter().zip(quad.weights()) {
        let (s, _) = s_lambda(dq, v, v_prime, lambda, PINV_RELATIVE_CUTOFF);
        acc += w * weight.evaluate(lambda) * s / (1.0 + lambda * (1.0 - lambda) * s);
    }
    acc
}

/// Minimum eigenvalue of V - f(D) dq dq^T. Nonnegative exactly when
/// s = dq^T V^-1 dq <= G(D).
pub fn matrix_tur_check(v: &SymMatrix, dq: &CurrentVector, d_bath: f64) -> Result<f64> {
    if d_bath < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "matrix_tur_check requires D >= 0, got {d_bath}"
        )));
    }
    if dq.norm() == 0.0 {
        return Ok(v.min_eigenvalue());
    }
    let coeff = f_of_d(d_bath)?;
    if coeff.is_infinite() {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(v.sub_outer(coeff, dq.components()).min_eigenvalue())
}

/// Witness bound along a fixed direction u:
/// int_0^1 lambda h_lambda(u . dq, u^T V' u, u^T V u) dlambda.
/// Dominated by `bound_b` for every u.
pub fn witness_bound_integral(
    u: &[f64],
    dq: &CurrentVector,
    v: &SymMatrix,
    v_prime: &SymMatrix,
    quad: &QuadratureRule,
) -> f64 {
    let x: f64 = u.iter().zip(dq.components()).map(|(a, b)| a * b).sum();
    let y = v_prime.quadratic_form(u);
    let z = v.quadratic_form(u);
    quad.integrate(|lambda| lambda * witness_h(x, y, z, lambda))
}

/// Robertson incompatibility ratio
/// C = |Tr(rho i[Q1, Q2])| / (2 sqrt(V11 V22) + epsilon), in [0, 1] up to
/// the regulator.
pub fn robertson_c(
    rho_e: &DensityMatrix,
    q1: &HermitianOperator,
    q2: &HermitianOperator,
    epsilon: f64,
) -> f64 {
    let comm = q1.matrix().commutator(q2.matrix());
    // i [Q1, Q2] is Hermitian; its expectation is the imaginary part of
    // Tr(rho [Q1, Q2]) up to sign.
    let i_comm = comm.scale(num_complex::Complex64::new(0.0, 1.0));
    let numerator = rho_e.matrix().trace_product_re(&i_comm).abs();
    let var1 = variance(rho_e, q1);
    let var2 = variance(rho_e, q2);
    numerator / (2.0 * (var1 * var2).max(0.0).sqrt() + epsilon)
}

fn variance(rho: &DensityMatrix, q: &HermitianOperator) -> f64 {
    let mean = q.expectation(rho);
    let sq = q.matrix().matmul(q.matrix());
    rho.matrix().trace_product_re(&sq) - mean * mean
}
