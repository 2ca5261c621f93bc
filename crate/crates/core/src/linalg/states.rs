//! Validated quantum-state and operator newtypes.
//!
//! Construction is where invariants are checked; once a value exists it can
//! be consumed anywhere without re-validation.

use super::eig::{hermitian_eig, jacobi_hermitian};
use super::matrix::{pauli_dot, ComplexMatrix};
use crate::error::{Error, Result};

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const EIGENVALUE_TOL: f64 = 1e-10;
pub const UNITARITY_TOL: f64 = 1e-10;

/// Default clamp applied to eigenvalues before spectral logarithms.
pub const DEFAULT_EIG_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let deviation = matrix.hermiticity_deviation();
        if deviation > HERMITICITY_TOL {
            return Err(Error::NotHermitian {
                deviation,
                tolerance: HERMITICITY_TOL,
            });
        }
        Ok(HermitianOperator { matrix })
    }

    /// For matrices Hermitian by construction (e.g. Q f(L) Q^dag outputs).
    pub(crate) fn from_hermitized(matrix: ComplexMatrix) -> Self {
        HermitianOperator {
            matrix: matrix.hermitize(),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Re Tr(rho A) with another operator; real for Hermitian pairs.
    pub fn expectation(&self, state: &DensityMatrix) -> f64 {
        state.matrix().trace_product_re(self.matrix())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    operator: HermitianOperator,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let operator = HermitianOperator::new(matrix)?;
        let trace = operator.matrix().trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::TraceNotOne {
                trace: trace.re,
                tolerance: TRACE_TOL,
            });
        }
        let (values, _) = jacobi_hermitian(operator.matrix());
        if values[0] < -EIGENVALUE_TOL {
            return Err(Error::NotPositive {
                eigenvalue: values[0],
                tolerance: EIGENVALUE_TOL,
            });
        }
        Ok(DensityMatrix { operator })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.operator.matrix()
    }

    pub fn hermitian(&self) -> &HermitianOperator {
        &self.operator
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    pub fn purity(&self) -> f64 {
        self.matrix().trace_product_re(self.matrix())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            operator: HermitianOperator {
                matrix: ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: ComplexMatrix,
}

impl UnitaryOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let gram = &matrix.adjoint() * &matrix;
        let deviation = (&gram - &ComplexMatrix::identity(matrix.dim())).frobenius_norm();
        if deviation > UNITARITY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(UnitaryOperator { matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// U A U^dag.
    pub fn conjugate(&self, a: &ComplexMatrix) -> ComplexMatrix {
        &(&self.matrix * a) * &self.matrix.adjoint()
    }

    /// U rho U^dag as a validated state.
    pub fn evolve(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.conjugate(rho.matrix()).hermitize())
    }
}

/// Bloch-parameterized qubit state (I + r n.sigma)/2. Requires 0 <= r < 1
/// so the state stays full rank, and a unit direction.
pub fn bloch_state(r: f64, n: [f64; 3]) -> Result<DensityMatrix> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::InvalidParameter(format!(
            "bloch radius must satisfy 0 <= r < 1, got {r}"
        )));
    }
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "bloch direction must be unit length, got |n| = {norm}"
        )));
    }
    let m = (&ComplexMatrix::identity(2) + &pauli_dot(n).scale_re(r)).scale_re(0.5);
    DensityMatrix::new(m)
}

/// Which factor of a bipartite product space survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    A,
    B,
}

/// Partial trace of an arbitrary matrix on a dim_a x dim_b product space.
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    keep: Keep,
) -> Result<ComplexMatrix> {
    if dim_a * dim_b != m.dim() {
        return Err(Error::DimensionMismatch(format!(
            "partial trace expects dim_a * dim_b = {}, got {} * {}",
            m.dim(),
            dim_a,
            dim_b
        )));
    }
    let out = match keep {
        Keep::A => ComplexMatrix::from_fn(dim_a, |i, j| {
            (0..dim_b).map(|k| m[(i * dim_b + k, j * dim_b + k)]).sum()
        }),
        Keep::B => ComplexMatrix::from_fn(dim_b, |k, l| {
            (0..dim_a).map(|i| m[(i * dim_b + k, i * dim_b + l)]).sum()
        }),
    };
    Ok(out)
}

/// Partial trace of a state; the reduction is validated as a density matrix.
pub fn partial_trace(
    rho: &DensityMatrix,
    dim_a: usize,
    dim_b: usize,
    keep: Keep,
) -> Result<DensityMatrix> {
    let m = partial_trace_matrix(rho.matrix(), dim_a, dim_b, keep)?;
    DensityMatrix::new(m.hermitize())
}

/// Spectral logarithm with eigenvalues clamped below at `floor` before the
/// log. No renormalization happens after clamping, so the result carries an
/// O(d * floor * |ln floor|) error for rank-deficient inputs.
pub fn matrix_log_psd(rho: &DensityMatrix, floor: f64) -> Result<HermitianOperator> {
    if floor <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "eigenvalue floor must be positive, got {floor}"
        )));
    }
    let decomp = hermitian_eig(rho.hermitian());
    Ok(HermitianOperator::from_hermitized(
        decomp.apply(|x| x.max(floor).ln()),
    ))
}

/// Spectral square root; negative roundoff eigenvalues clamp to zero.
pub fn matrix_sqrt_psd(rho: &DensityMatrix) -> HermitianOperator {
    let decomp = hermitian_eig(rho.hermitian());
    HermitianOperator::from_hermitized(decomp.apply(|x| x.max(0.0).sqrt()))
}
