//! Hermitian eigendecomposition via cyclic Jacobi rotations.
//!
//! For the 2x2 and 4x4 matrices that dominate this crate, Jacobi converges
//! quadratically in a handful of sweeps and reconstructs to near machine
//! precision, with no external solver dependency.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::states::HermitianOperator;

const MAX_SWEEPS: usize = 60;

/// Eigenvalues ascending, eigenvectors as the matching columns of a unitary.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    /// Q f(Lambda) Q^dag, hermitized.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let q = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n);
        for k in 0..n {
            let fk = f(self.eigenvalues[k]);
            if fk == 0.0 {
                continue;
            }
            for i in 0..n {
                let qik = q[(i, k)];
                for j in 0..n {
                    out[(i, j)] += qik * q[(j, k)].conj() * fk;
                }
            }
        }
        out.hermitize()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply(|x| x)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// Diagonalize a Hermitian operator. Eigenvalues are returned ascending.
pub fn hermitian_eig(h: &HermitianOperator) -> SpectralDecomposition {
    let (values, vectors) = jacobi_hermitian(h.matrix());
    SpectralDecomposition {
        eigenvalues: values,
        eigenvectors: vectors,
    }
}

/// Cyclic Jacobi on a Hermitian matrix. Returns (eigenvalues ascending, Q).
pub(crate) fn jacobi_hermitian(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = h.dim();
    let mut a = h.clone();
    let mut q = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(1.0);
    let stop = 1e-15 * scale;
    let skip = 1e-18 * scale;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for r in (p + 1)..n {
                off += 2.0 * a[(p, r)].norm_sqr();
            }
        }
        if off.sqrt() <= stop {
            break;
        }
        for p in 0..n - 1 {
            for r in (p + 1)..n {
                let apr = a[(p, r)];
                let mag = apr.norm();
                if mag <= skip {
                    continue;
                }
                // Phase e^{i alpha} of the pivot, then a real rotation on the
                // phase-absorbed 2x2 block.
                let phase = apr / mag;
                let app = a[(p, p)].re;
                let arr = a[(r, r)].re;
                let tau = (arr - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G[p][p] = c, G[p][r] = s, G[r][p] = -s conj(phase),
                // G[r][r] = c conj(phase); updates A <- G^dag A G, Q <- Q G.
                let sp = phase.conj() * s;
                let cp = phase.conj() * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akr = a[(k, r)];
                    a[(k, p)] = akp * c - akr * sp;
                    a[(k, r)] = akp * s + akr * cp;
                }
                let sph = phase * s;
                let cph = phase * c;
                for k in 0..n {
                    let apk = a[(p, k)];
                    let ark = a[(r, k)];
                    a[(p, k)] = apk * c - ark * sph;
                    a[(r, k)] = apk * s + ark * cph;
                }
                a[(p, r)] = Complex64::new(0.0, 0.0);
                a[(r, p)] = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    let qkp = q[(k, p)];
                    let qkr = q[(k, r)];
                    q[(k, p)] = qkp * c - qkr * sp;
                    q[(k, r)] = qkp * s + qkr * cp;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| q[(i, order[j])]);
    (values, vectors)
}

/// Fix each eigenvector's global phase so the first component with
/// |v_i| > 1e-8 is real positive. Makes degenerate-spectrum bases stable
/// enough for downstream deterministic constructions.
pub fn phase_fix_columns(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.dim();
    let mut out = m.clone();
    for j in 0..n {
        let mut pivot = None;
        for i in 0..n {
            if out[(i, j)].norm() > 1e-8 {
                pivot = Some(out[(i, j)]);
                break;
            }
        }
        if let Some(z) = pivot {
            let phase = z.conj() / z.norm();
            for i in 0..n {
                out[(i, j)] *= phase;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::{pauli_dot, pauli_y, pauli_z};

    fn herm(m: ComplexMatrix) -> HermitianOperator {
        HermitianOperator::new(m).unwrap()
    }

    #[test]
    fn identity_spectrum() {
        let d = hermitian_eig(&herm(ComplexMatrix::identity(2)));
        assert!((d.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((d.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pauli_z_spectrum() {
        let d = hermitian_eig(&herm(pauli_z()));
        assert!((d.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((d.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bloch_state_eigenvalues() {
        // (I + 0.7 sigma_y)/2 has eigenvalues (1 +- 0.7)/2 = 0.15, 0.85
        let m = (&ComplexMatrix::identity(2) + &pauli_y().scale_re(0.7)).scale_re(0.5);
        let d = hermitian_eig(&herm(m));
        assert!((d.eigenvalues[0] - 0.15).abs() < 1e-13);
        assert!((d.eigenvalues[1] - 0.85).abs() < 1e-13);
    }

    #[test]
    fn reconstruction_random_4x4() {
        // splitmix-ish pseudo entries keep the test dependency-free
        let mut state = 0x9E3779B97F4A7C15u64;
        let mut next = move || {
            state ^= state >> 30;
            state = state.wrapping_mul(0xBF58476D1CE4E5B9);
            state ^= state >> 27;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..200 {
            let raw = ComplexMatrix::from_fn(4, |_, _| Complex64::new(next(), next()));
            let h = raw.hermitize();
            let d = hermitian_eig(&herm(h.clone()));
            let err = (&d.reconstruct() - &h).frobenius_norm();
            assert!(err <= 1e-12 * h.frobenius_norm().max(1.0), "err = {err:e}");
            // columns orthonormal
            let qtq = &d.eigenvectors.adjoint() * &d.eigenvectors;
            let dev = (&qtq - &ComplexMatrix::identity(4)).frobenius_norm();
            assert!(dev < 1e-13);
        }
    }

    #[test]
    fn phase_fix_consistency() {
        let m = pauli_dot([0.3, -0.5, 0.81]).hermitize();
        let d = hermitian_eig(&herm(m));
        let fixed = phase_fix_columns(&d.eigenvectors);
        for j in 0..2 {
            let mut first = None;
            for i in 0..2 {
                if fixed[(i, j)].norm() > 1e-8 {
                    first = Some(fixed[(i, j)]);
                    break;
                }
            }
            let z = first.unwrap();
            assert!(z.im.abs() < 1e-12 && z.re > 0.0);
        }
    }
}
