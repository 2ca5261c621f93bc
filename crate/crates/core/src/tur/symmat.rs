//! Small real symmetric matrices for the charge-covariance geometry.
//!
//! The charge count is 2 in this artifact, so everything here is tuned for
//! honesty over asymptotic speed: full storage, cyclic Jacobi, explicit
//! pseudo-inverse handling through the spectral form.

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        SymMatrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.data[i * values.len() + i] = v;
        }
        m
    }

    /// Build from possibly asymmetric entries by symmetrizing (A + A^T)/2.
    pub fn from_rows_symmetrized(rows: &[Vec<f64>]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "ragged rows");
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            for (j, &entry) in row.iter().enumerate() {
                m.data[i * dim + j] = 0.5 * (entry + rows[j][i]);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Sets both (i, j) and (j, i).
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] = value;
        self.data[j * self.dim + i] = value;
    }

    /// a * self + b * other.
    pub fn lincomb(&self, a: f64, other: &SymMatrix, b: f64) -> SymMatrix {
        assert_eq!(self.dim, other.dim);
        SymMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        }
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        self.lincomb(1.0, other, -1.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// u^T M u.
    pub fn quadratic_form(&self, u: &[f64]) -> f64 {
        self.matvec(u).iter().zip(u).map(|(x, y)| x * y).sum()
    }

    /// Subtract c * v v^T.
    pub fn sub_outer(&self, c: f64, v: &[f64]) -> SymMatrix {
        assert_eq!(v.len(), self.dim);
        let mut out = self.clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.data[i * self.dim + j] -= c * v[i] * v[j];
            }
        }
        out
    }

    /// Eigenvalues ascending with matching orthonormal eigenvectors.
    pub fn eig(&self) -> SymEig {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut q = SymMatrix::identity(n).data;
        let scale = self.frobenius_norm().max(1.0);
        let stop = 1e-15 * scale;
        let skip = 1e-18 * scale;

        for _ in 0..MAX_SWEEPS {
            let mut off = 0.0;
            for p in 0..n {
                for r in (p + 1)..n {
                    off += 2.0 * a[p * n + r] * a[p * n + r];
                }
            }
            if off.sqrt() <= stop {
                break;
            }
            for p in 0..n - 1 {
                for r in (p + 1)..n {
                    let apr = a[p * n + r];
                    if apr.abs() <= skip {
                        continue;
                    }
                    let tau = (a[r * n + r] - a[p * n + p]) / (2.0 * apr);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akr = a[k * n + r];
                        a[k * n + p] = c * akp - s * akr;
                        a[k * n + r] = s * akp + c * akr;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let ark = a[r * n + k];
                        a[p * n + k] = c * apk - s * ark;
                        a[r * n + k] = s * apk + c * ark;
                    }
                    a[p * n + r] = 0.0;
                    a[r * n + p] = 0.0;
                    for k in 0..n {
                        let qkp = q[k * n + p];
                        let qkr = q[k * n + r];
                        q[k * n + p] = c * qkp - s * qkr;
                        q[k * n + r] = s * qkp + c * qkr;
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
        let values: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
        let vectors: Vec<Vec<f64>> = order
            .iter()
            .map(|&col| (0..n).map(|row| q[row * n + col]).collect())
            .collect();
        SymEig { values, vectors }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eig().values[0]
    }

    /// Validates PSD within `tolerance` on the minimum eigenvalue.
    pub fn check_psd(&self, tolerance: f64) -> Result<()> {
        let min = self.min_eigenvalue();
        if min < -tolerance {
            return Err(Error::NotPositive {
                eigenvalue: min,
                tolerance,
            });
        }
        Ok(())
    }
}

/// Eigenpairs of a real symmetric matrix, values ascending.
#[derive(Debug, Clone)]
pub struct SymEig {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl SymEig {
    /// Pseudo-inverse quadratic form v^T M^+ v discarding eigenvalues below
    /// `cutoff`, plus the norm of the component of v outside the kept range.
    /// The outside component is accumulated over the discarded eigenvectors
    /// directly; subtracting from ||v||^2 would sit at the sqrt(eps) noise
    /// floor for full-rank inputs.
    pub fn pinv_quadratic_form(&self, v: &[f64], cutoff: f64) -> (f64, f64) {
        let mut s = 0.0;
        let mut outside_sqr = 0.0;
        for (value, vector) in self.values.iter().zip(&self.vectors) {
            let proj: f64 = vector.iter().zip(v).map(|(a, b)| a * b).sum();
            if *value > cutoff {
                s += proj * proj / value;
            } else {
                outside_sqr += proj * proj;
            }
        }
        (s, outside_sqr.sqrt())
    }
}
