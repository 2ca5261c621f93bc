//! Haar-distributed unitaries and uniform sphere directions.
//!
//! All draws go through an explicit `Rng` so callers control determinism;
//! a fixed seed reproduces every sample bit for bit.

use num_complex::Complex64;
use rand::Rng;

use super::matrix::ComplexMatrix;
use super::states::UnitaryOperator;

/// Uniform in [lo, hi).
pub fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Standard normal pair via Box-Muller.
pub fn normal_pair<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let u1: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
    let u2: f64 = rng.random();
    let radius = (-2.0 * u1.ln()).sqrt();
    let angle = 2.0 * std::f64::consts::PI * u2;
    (radius * angle.cos(), radius * angle.sin())
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let (re, im) = normal_pair(rng);
    Complex64::new(re, im)
}

/// Uniform direction on the unit sphere.
pub fn unit_sphere<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let z = uniform(rng, -1.0, 1.0);
    let phi = uniform(rng, 0.0, 2.0 * std::f64::consts::PI);
    let s = (1.0 - z * z).max(0.0).sqrt();
    [s * phi.cos(), s * phi.sin(), z]
}

/// Haar-random element of SU(2), built from a normalized complex 2-vector.
pub fn haar_su2<R: Rng + ?Sized>(rng: &mut R) -> UnitaryOperator {
    loop {
        let a = complex_normal(rng);
        let b = complex_normal(rng);
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if norm < 1e-150 {
            continue;
        }
        let (a, b) = (a / norm, b / norm);
        let m = ComplexMatrix::from_rows(&[vec![a, -b.conj()], vec![b, a.conj()]]);
        return UnitaryOperator::new(m).expect("SU(2) construction is unitary");
    }
}

/// Haar-random element of U(d): QR of a complex Ginibre matrix via modified
/// Gram-Schmidt, whose positive-diagonal R makes Q exactly Haar.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> UnitaryOperator {
    loop {
        let g = ComplexMatrix::from_fn(dim, |_, _| complex_normal(rng));
        if let Some(q) = gram_schmidt(&g) {
            return UnitaryOperator::new(q).expect("Gram-Schmidt output is unitary");
        }
    }
}

fn gram_schmidt(g: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = g.dim();
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| (0..n).map(|i| g[(i, j)]).collect()).collect();
    for j in 0..n {
        // two orthogonalization passes keep loss of orthogonality near eps
        for _ in 0..2 {
            for k in 0..j {
                let proj: Complex64 = (0..n).map(|i| cols[k][i].conj() * cols[j][i]).sum();
                let reference = cols[k].clone();
                for (z, c) in cols[j].iter_mut().zip(reference) {
                    *z -= proj * c;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-150 {
            return None;
        }
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    Some(ComplexMatrix::from_fn(n, |i, j| cols[j][i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn deterministic_replay() {
        let u1 = haar_su2(&mut ChaCha8Rng::seed_from_u64(42));
        let u2 = haar_su2(&mut ChaCha8Rng::seed_from_u64(42));
        assert_eq!(u1.matrix(), u2.matrix());
        let v1 = haar_unitary(4, &mut ChaCha8Rng::seed_from_u64(7));
        let v2 = haar_unitary(4, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(v1.matrix(), v2.matrix());
    }

    #[test]
    fn column_norms() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let u = haar_unitary(3, &mut rng);
            for j in 0..3 {
                let norm: f64 = (0..3).map(|i| u.matrix()[(i, j)].norm_sqr()).sum();
                assert!((norm - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn haar_first_entry_moment() {
        // E |U_00|^2 = 1/d for Haar; 3 sigma band with Var = (d-1)/(d^2 (d+1))
        for d in [2usize, 4] {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            let n = 10_000;
            let mut acc = 0.0;
            for _ in 0..n {
                let u = if d == 2 {
                    haar_su2(&mut rng)
                } else {
                    haar_unitary(d, &mut rng)
                };
                acc += u.matrix()[(0, 0)].norm_sqr();
            }
            let mean = acc / n as f64;
            let var = (d as f64 - 1.0) / ((d * d) as f64 * (d as f64 + 1.0));
            let band = 3.0 * (var / n as f64).sqrt();
            assert!(
                (mean - 1.0 / d as f64).abs() < band,
                "d={d}: mean {mean} outside 1/d +- {band}"
            );
        }
    }

    #[test]
    fn left_invariance_moment() {
        // multiplying by a fixed unitary must not move the |U_00|^2 moment
        let fixed = haar_su2(&mut ChaCha8Rng::seed_from_u64(5));
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 10_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let u = haar_su2(&mut rng);
            let m = fixed.matrix() * u.matrix();
            acc += m[(0, 0)].norm_sqr();
        }
        let mean = acc / n as f64;
        let band = 3.0 * (1.0f64 / 12.0 / n as f64).sqrt();
        assert!((mean - 0.5).abs() < band);
    }

    #[test]
    fn sphere_mean_is_origin() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 10_000;
        let mut acc = [0.0f64; 3];
        for _ in 0..n {
            let v = unit_sphere(&mut rng);
            for (a, x) in acc.iter_mut().zip(v) {
                *a += x;
            }
        }
        // component variance is 1/3; allow 4 sigma
        let band = 4.0 * (1.0f64 / 3.0 / n as f64).sqrt();
        for a in acc {
            assert!((a / n as f64).abs() < band);
        }
    }
}
