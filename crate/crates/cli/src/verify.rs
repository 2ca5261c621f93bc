//! The `verify` subcommand: every module invariant re-run as a named check
//! with an explicit metric and tolerance, printed as a table.

use std::process::ExitCode;
use std::time::Instant;

use naqtur_core::collision::{
    fixed_point_unitary, partial_swap, run_collision, sample_bath, simulate_one, CollisionConfig,
    SystemMode,
};
use naqtur_core::divergence::{
    chi2_lambda, f_divergence_via_weights, gauss_legendre, hellinger_affinity,
    petz_f_divergence_spectral, relative_entropy, WeightFunction,
};
use naqtur_core::harness::{
    derive_seed, run, write_csv, ExperimentConfig, StratAxis, Strategy, VIOLATION_TOL,
};
use naqtur_core::linalg::eig::hermitian_eig;
use naqtur_core::linalg::matrix::{tensor, ComplexMatrix};
use naqtur_core::linalg::random::{complex_normal, haar_su2, haar_unitary, uniform, unit_sphere};
use naqtur_core::linalg::states::{
    bloch_state, matrix_log_psd, partial_trace, partial_trace_matrix, DensityMatrix,
    HermitianOperator, Keep, UnitaryOperator, DEFAULT_EIG_FLOOR,
};
use naqtur_core::tur::{
    bound_b, f_closed, g_of_d, matrix_tur_check, robertson_c, s_lambda, witness_bound_integral,
    witness_h, ChargeSet, CurrentVector, SymMatrix, PINV_RELATIVE_CUTOFF, ROBERTSON_EPSILON,
};
use naqtur_core::Result;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::VerifyArgs;

struct Check {
    name: &'static str,
    passed: bool,
    metric: f64,
    tolerance: f64,
    detail: String,
}

impl Check {
    fn new(name: &'static str, metric: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Check {
            name,
            passed: metric <= tolerance,
            metric,
            tolerance,
            detail: detail.into(),
        }
    }

    fn boolean(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name,
            passed,
            metric: if passed { 0.0 } else { 1.0 },
            tolerance: 0.0,
            detail: detail.into(),
        }
    }
}

fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianOperator {
    let raw = ComplexMatrix::from_fn(dim, |_, _| complex_normal(rng));
    HermitianOperator::new(raw.hermitize()).unwrap()
}

fn random_state_pair<R: Rng + ?Sized>(rng: &mut R) -> (DensityMatrix, DensityMatrix) {
    (
        bloch_state(uniform(rng, 0.1, 0.95), unit_sphere(rng)).unwrap(),
        bloch_state(uniform(rng, 0.1, 0.95), unit_sphere(rng)).unwrap(),
    )
}

/// Relaxed tolerance for the divergence-integral residual at low quadrature
/// orders; reaches the spec's 1e-6 relative budget at the default order 64.
fn kl_rel_tol(order: usize) -> f64 {
    1e-6f64.max(10f64.powf(-(order as f64) / 8.0))
}

fn bh_abs_tol(order: usize) -> f64 {
    // endpoint sqrt weight: roughly cubic convergence in the order
    1e-4 * (64.0 / order as f64).powi(3).max(1.0)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode> {
    let seed = crate::resolve_seed(args.seed, None)?;
    println!("master seed: {seed}");
    println!(
        "quadrature order: {} | samples: {}",
        args.quadrature_order, args.samples
    );
    let t0 = Instant::now();

    let quad_flag = gauss_legendre(args.quadrature_order)?;
    let quad64 = gauss_legendre(64)?;
    let n = args.samples.max(10);
    let mut checks: Vec<Check> = Vec::new();

    // -- linear algebra layer ------------------------------------------
    {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 1));
        let mut worst = 0.0f64;
        for i in 0..n {
            let dim = if i % 2 == 0 { 2 } else { 4 };
            let h = random_hermitian(dim, &mut rng);
            let d = hermitian_eig(&h);
            let err = (&d.reconstruct() - h.matrix()).frobenius_norm()
                / h.matrix().frobenius_norm().max(1.0);
            worst = worst.max(err);
        }
        checks.push(Check::new(
            "eig-reconstruction",
            worst,
            1e-10,
            format!("{n} random Hermitian (dims 2, 4)"),
        ));
    }
    {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 2));
        let mut worst = 0.0f64;
        for i in 0..200 {
            let dim = if i % 2 == 0 { 2 } else { 4 };
            let h = random_hermitian(dim, &mut rng);
            // rescale the spectrum into [-5, 5]
            let d = hermitian_eig(&h);
            let top = d
                .eigenvalues
                .iter()
                .fold(0.0f64, |acc, &x| acc.max(x.abs()))
                .max(1e-3);
            let scaled = HermitianOperator::new(h.matrix().scale_re(5.0 / top)).unwrap();
            let exp = hermitian_eig(&scaled).apply(f64::exp);
            let trace = exp.trace().re;
            let rho = DensityMatrix::new(exp.scale_re(1.0 / trace)).unwrap();
            let log = matrix_log_psd(&rho, DEFAULT_EIG_FLOOR).unwrap();
            let recovered =
                &log.matrix().clone() + &ComplexMatrix::identity(dim).scale_re(trace.ln());
            worst = worst.max((&recovered - scaled.matrix()).frobenius_norm());
        }
        checks.push(Check::new(
            "log-exp-roundtrip",
            worst,
            1e-8,
            "200 spectra in [-5, 5]",
        ));
    }
    {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 3));
        let mut worst = 0.0f64;
        let mut valid = true;
        for _ in 0..n {
            let (a, b) = random_state_pair(&mut rng);
            let u = haar_unitary(4, &mut rng);
            let joint = DensityMatrix::new(tensor(a.matrix(), b.matrix())).unwrap();
            let mixed = u.evolve(&joint).unwrap();
            for keep in [Keep::A, Keep::B] {
                match partial_trace(&mixed, 2, 2, keep) {
                    Ok(red) => {
                        worst = worst.max((red.matrix().trace().re - 1.0).abs());
                    }
                    Err(_) => valid = false,
                }
            }
        }
        checks.push(Check::boolean(
            "partial-trace-validity",
            valid && worst <= 1e-12,
            format!("{n} random two-qubit states, worst trace drift {worst:.1e}"),
        ));
    }
    {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 4));
        let mut worst = 0.0f64;
        for _ in 0..200 {
            let a = ComplexMatrix::from_fn(2, |_, _| complex_normal(&mut rng));
            let b = ComplexMatrix::from_fn(2, |_, _| complex_normal(&mut rng));
            let reduced = partial_trace_matrix(&tensor(&a, &b), 2, 2, Keep::A).unwrap();
            worst = worst.max((&reduced - &a.scale(b.trace())).frobenius_norm());
        }
        checks.push(Check::new(
            "tensor-trace-identity",
            worst,
            1e-12,
            "Tr_B(A x B) = A tr(B), 200 draws",
        ));
    }
    {
        let quad = gauss_legendre(64).unwrap();
        let config = CollisionConfig::default();
        let a = simulate_one(&config, &quad, derive_seed(seed, 5)).unwrap();
        let b = simulate_one(&config, &quad, derive_seed(seed, 5)).unwrap();
        let u1 = haar_su2(&mut ChaCha8Rng::seed_from_u64(seed));
        let u2 = haar_su2(&mut ChaCha8Rng::seed_from_u64(seed));
        checks.push(Check::boolean(
            "determinism-replay",
            a.sigma.to_bits() == b.sigma.to_bits()
                && a.bound.to_bits() == b.bound.to_bits()
                && u1.matrix() == u2.matrix(),
            "identical seeds reproduce states, unitaries and records bit for bit",
        ));
    }
    {
        let mut worst = 0.0f64;
        for d in [2usize, 4] {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 6 + d as u64));
            let draws = 10_000;
            let mut acc = 0.0;
            for _ in 0..draws {
                let u = if d == 2 {
                    haar_su2(&mut rng)
                } else {
                    haar_unitary(d, &mut rng)
                };
                acc += u.matrix()[(0, 0)].norm_sqr();
            }
            let mean = acc / draws as f64;
            let var = (d as f64 - 1.0) / ((d * d) as f64 * (d as f64 + 1.0));
            let band = 3.0 * (var / draws as f64).sqrt();
            worst = worst.max((mean - 1.0 / d as f64).abs() / band);
        }
        checks.push(Check::new(
            "haar-moment",
            worst,
            1.0,
            "mean |U_00|^2 within 3 sigma of 1/d, d = 2 and 4 (metric in sigma/3 units)",
        ));
    }

    // -- divergences ---------------------------------------------------
    {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 10));
        let rel = kl_rel_tol(args.quadrature_order);
        let mut worst_scaled = 0.0f64;
        let mut pairs = Vec::new();
        for _ in 0..n {
            let (rho, sigma) = random_state_pair(&mut rng);
            let d = relative_entropy(&rho, &sigma, DEFAULT_EIG_FLOOR)?;
            let (via, _) = f_divergence_via_weights(&rho, &sigma, &WeightFunction::Kl, &quad_flag);
            let tol = 1e-8f64.max(rel * d);
            worst_scaled = worst_scaled.max((via - d).abs() / tol);
            pairs.push((rho, sigma, d));
        }
        checks.push(Check::new(
            "kl-integral-representation",
            worst_scaled,
            1.0,
            format!(
                "{n} pairs at order {}, per-pair tol max(1e-8, {rel:.1e} * D), metric is worst residual/tol",
                args.quadrature_order
            ),
        ));

        let median = |order: usize| -> Result<f64> {
            let quad = gauss_legendre(order)?;
            let mut residuals: Vec<f64> = pairs
                .iter()
                .map(|(rho, sigma, d)| {
                    (f_divergence_via_weights(rho, sigma, &WeightFunction::Kl, &quad).0 - d).abs()
                })
                .collect();
            residuals.sort_by(f64::total_cmp);
            Ok(residuals[residuals.len() / 2])
        };
        let m1 = median(args.quadrature_order)?;
        let m2 = median(args.quadrature_order * 2)?;
        checks.push(Check::boolean(
            "kl-integral-convergence",
            m2 <= m1 + 5e-15,
            format!(
                "median residual {m1:.1e} (order {}) -> {m2:.1e} (order {}), floor allowance 5e-15",
                args.quadrature_order,
                args.quadrature_order * 2
            ),
        ));
    }
    {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 11));
        let f_kl = |t: f64| if t > 0.0 { t * t.ln() } else { 0.0 };
        let mut worst = 0.0f64;
        for _ in 0..300 {
            let (rho, sigma) = random_state_pair(&mut rng);
            let spectral = petz_f_divergence_spectral(&rho, &sigma, f_kl)?;
            let logs = relative_entropy(&rho, &sigma, DEFAULT_EIG_FLOOR)?;
            worst = worst.max((spectral - logs).abs());
        }
        checks.push(Check::new(
            "petz-spectral-oracle",
            worst,
            1e-10,
            "modular-operator route vs log route, 300 pairs",
        ));
    }
    {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 12));
        let mut worst = 0.0f64;
        for _ in 0..300 {
            let (rho, sigma) = random_state_pair(&mut rng);
            let lambda = uniform(&mut rng, 0.02, 0.98);
            let (a, _) = chi2_lambda(&rho, &sigma, lambda);
            let (b, _) = chi2_lambda(&sigma, &rho, 1.0 - lambda);
            worst = worst.max((a - b).abs() / a.abs().max(1.0));
        }
        checks.push(Check::new(
            "chi2-reflection-symmetry",
            worst,
            1e-11,
            "chi2(rho||sigma; l) = chi2(sigma||rho; 1-l), 300 pairs",
        ));
    }
    {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 13));
        let tol = bh_abs_tol(args.quadrature_order);
        let mut worst = 0.0f64;
        for _ in 0..300 {
            let (rho, sigma) = random_state_pair(&mut rng);
            let (via, _) =
                f_divergence_via_weights(&rho, &sigma, &WeightFunction::BuresHellinger, &quad_flag);
            worst = worst.max((via - hellinger_affinity(&rho, &sigma)).abs());
        }
        checks.push(Check::new(
            "bures-hellinger-weight",
            worst,
            tol,
            format!("sqrt-endpoint weight at order {}, tol {tol:.1e}", args.quadrature_order),
        ));
    }

    // -- bound geometry --------------------------------------------------
    {
        let v = SymMatrix::from_rows_symmetrized(&[vec![0.3, 0.07], vec![0.07, 0.18]]);
        let direction = [0.6, -0.8];
        let base = CurrentVector::new(direction.to_vec());
        let (s0, _) = s_lambda(&base, &v, &v, 0.5, PINV_RELATIVE_CUTOFF);
        let mut worst = 0.0f64;
        let mut s = 1e-4;
        while s <= 100.0 {
            let scale = (s / s0).sqrt();
            let dq = CurrentVector::new(direction.iter().map(|x| x * scale).collect());
            let report = bound_b(&dq, &v, &v, &quad64);
            worst = worst.max((report.bound - f_closed(report.s_simple)?).abs());
            s *= 2.3;
        }
        checks.push(Check::new(
            "symmetric-collapse",
            worst,
            1e-8,
            "|B - F(s)| with V' = V over s in [1e-4, 1e2] (fixed order 64)",
        ));
    }
    {
        let mut worst = 0.0f64;
        let mut d = 1e-6;
        while d <= 10.0 {
            worst = worst.max((f_closed(g_of_d(d)?)? - d).abs());
            d *= 2.0;
        }
        checks.push(Check::new(
            "inverse-pair",
            worst,
            1e-10,
            "|F(G(D)) - D| on log grid [1e-6, 10]",
        ));
    }
    {
        let mut worst = 0.0f64;
        let mut s = 1e-4;
        while s <= 0.1 {
            let resid = (f_closed(s)? - (s / 2.0 - s * s / 12.0)).abs();
            worst = worst.max(resid / (s * s * s));
            s *= 1.9;
        }
        checks.push(Check::new(
            "small-s-expansion",
            worst,
            0.02,
            "|F(s) - (s/2 - s^2/12)| / s^3 for s <= 0.1",
        ));
    }
    {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 14));
        let mut agree = true;
        for _ in 0..300 {
            let a: Vec<f64> = (0..4).map(|_| uniform(&mut rng, -1.0, 1.0)).collect();
            let v = SymMatrix::from_rows_symmetrized(&[
                vec![a[0] * a[0] + a[1] * a[1] + 0.01, a[0] * a[2] + a[1] * a[3]],
                vec![a[0] * a[2] + a[1] * a[3], a[2] * a[2] + a[3] * a[3] + 0.01],
            ]);
            let dq = CurrentVector::new(vec![
                uniform(&mut rng, -0.5, 0.5),
                uniform(&mut rng, -0.5, 0.5),
            ]);
            let (s, _) = s_lambda(&dq, &v, &v, 0.5, PINV_RELATIVE_CUTOFF);
            if s <= 0.0 {
                continue;
            }
            let d = f_closed(s)? * uniform(&mut rng, 0.6, 1.6);
            let g = g_of_d(d)?;
            let min_eig = matrix_tur_check(&v, &dq, d)?;
            if (g - s).abs() > 1e-10 {
                agree &= if g > s { min_eig >= -1e-10 } else { min_eig <= 1e-10 };
            }
        }
        checks.push(Check::boolean(
            "psd-equivalence",
            agree,
            "sign of min eig(V - f(D) dq dq^T) tracks sign of G(D) - s, 300 triples",
        ));
    }

    // -- collisions -------------------------------------------------------
    let collision_records = {
        let mut records = Vec::new();
        for (i, mode) in SystemMode::ALL.iter().enumerate() {
            let config = ExperimentConfig {
                collision: CollisionConfig {
                    system_mode: *mode,
                    seed: derive_seed(seed, 20 + i as u64),
                    ..CollisionConfig::default()
                },
                n_samples: n.div_ceil(3),
                strategy: Strategy::MonteCarlo,
                ..ExperimentConfig::default()
            };
            records.extend(run(&config)?.records);
        }
        records
    };
    {
        let mut split_worst = 0.0f64;
        let mut violations = 0usize;
        for t in &collision_records {
            if t.record.is_flagged() {
                continue;
            }
            split_worst =
                split_worst.max((t.record.sigma - t.record.mutual_info - t.record.d_bath).abs());
            if t.record.d_bath < t.record.bound - VIOLATION_TOL
                || t.record.sigma < t.record.d_bath - 1e-12
            {
                violations += 1;
            }
        }
        checks.push(Check::boolean(
            "collision-chain",
            violations == 0 && split_worst <= 1e-10,
            format!(
                "{} records across all modes: 0 expected violations (got {violations}), split residual {split_worst:.1e}",
                collision_records.len()
            ),
        ));
    }
    {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 21));
        let mut worst_excess = f64::NEG_INFINITY;
        for t in collision_records.iter().take(100) {
            let dq = CurrentVector::new(t.record.dq.clone());
            for _ in 0..50 {
                let u = [uniform(&mut rng, -1.0, 1.0), uniform(&mut rng, -1.0, 1.0)];
                let w = witness_bound_integral(&u, &dq, &t.record.v, &t.record.v_prime, &quad64);
                worst_excess = worst_excess.max(w - t.record.bound);
            }
        }
        checks.push(Check::new(
            "witness-dominance",
            worst_excess,
            1e-12,
            "max over 100 records x 50 directions of witness - bound",
        ));
    }
    {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 22));
        let config = CollisionConfig::default();
        let mut worst = 0.0f64;
        for _ in 0..500 {
            let (rho_e, _, _) = sample_bath(&config, &mut rng);
            let u_fp = fixed_point_unitary(&rho_e, &mut rng);
            let joint = tensor(rho_e.matrix(), rho_e.matrix());
            worst = worst.max((&u_fp.conjugate(&joint) - &joint).frobenius_norm());
        }
        checks.push(Check::new(
            "fixed-point-property",
            worst,
            1e-12,
            "||U_fp (rho x rho) U_fp^dag - rho x rho||_F, 500 draws",
        ));
    }
    {
        let rho_s = bloch_state(0.8, [0.6, 0.0, 0.8]).unwrap();
        let rho_e = bloch_state(0.3, [0.0, 1.0, 0.0]).unwrap();
        let u = partial_swap(std::f64::consts::FRAC_PI_2)?;
        let (_, _, out_e) = run_collision(&rho_s, &rho_e, &u)?;
        checks.push(Check::new(
            "full-swap-limit",
            (out_e.matrix() - rho_s.matrix()).frobenius_norm(),
            1e-12,
            "phi = pi/2 with U_fp = I hands the system state to the probe",
        ));
    }
    {
        let quad = gauss_legendre(64)?;
        let drift_median = |mode: SystemMode, eps: Option<f64>, salt: u64| -> f64 {
            let config = CollisionConfig {
                system_mode: mode,
                eps_min: eps.unwrap_or(1e-3),
                eps_max: eps.unwrap_or(0.3),
                ..CollisionConfig::default()
            };
            let mut drifts: Vec<f64> = (0..300u64)
                .map(|i| {
                    simulate_one(&config, &quad, derive_seed(seed, salt + i))
                        .unwrap()
                        .cov_drift
                })
                .collect();
            drifts.sort_by(f64::total_cmp);
            drifts[drifts.len() / 2]
        };
        let small = drift_median(SystemMode::SmallIsospectral, Some(1e-3), 3000);
        let haar = drift_median(SystemMode::HaarIsospectral, None, 4000);
        checks.push(Check::boolean(
            "near-fixed-point-scaling",
            small * 10.0 <= haar,
            format!("median cov drift {small:.2e} (eps = 1e-3) vs {haar:.2e} (Haar)"),
        ));
    }
    {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 23));
        let charges = ChargeSet::pauli_xz();
        let rho = bloch_state(0.7, [0.0, 1.0, 0.0]).unwrap();
        let constructed = (robertson_c(
            &rho,
            &charges.charges()[0],
            &charges.charges()[1],
            ROBERTSON_EPSILON,
        ) - 0.7)
            .abs();
        let mut in_range = true;
        for _ in 0..2000 {
            let set = ChargeSet::random_frame(&mut rng);
            let state = bloch_state(uniform(&mut rng, 0.0, 0.95), unit_sphere(&mut rng)).unwrap();
            let c = robertson_c(
                &state,
                &set.charges()[0],
                &set.charges()[1],
                ROBERTSON_EPSILON,
            );
            in_range &= (-1e-12..=1.0 + 1e-9).contains(&c);
        }
        checks.push(Check::boolean(
            "robertson-ratio",
            in_range && constructed <= 1e-12,
            format!("C in [0, 1+1e-9] on 2000 draws; constructed case off by {constructed:.1e}"),
        ));
    }
    {
        // classical commuting configuration saturates the bound exactly
        let rho_e = bloch_state(0.6, [1.0, 0.0, 0.0]).unwrap();
        let rho_s = bloch_state(0.3, [1.0, 0.0, 0.0]).unwrap();
        let u = partial_swap(0.9)?;
        let (_, _, rho_e_out) = run_collision(&rho_s, &rho_e, &u)?;
        let charges = ChargeSet::pauli_xz();
        let dq = naqtur_core::tur::current_vector(&rho_e, &rho_e_out, &charges);
        let v = naqtur_core::tur::covariance_matrix(&rho_e, &charges);
        let vp = naqtur_core::tur::covariance_matrix(&rho_e_out, &charges);
        let report = bound_b(&dq, &v, &vp, &quad64);
        let d_bath = relative_entropy(&rho_e_out, &rho_e, DEFAULT_EIG_FLOOR)?;
        checks.push(Check::new(
            "classical-saturation",
            (d_bath - report.bound).abs(),
            1e-12,
            "commuting in-plane collision meets the bound exactly",
        ));
    }

    // -- harness ----------------------------------------------------------
    {
        let mut seen = std::collections::HashSet::with_capacity(1 << 20);
        let mut distinct = true;
        for i in 0..1_000_000u64 {
            distinct &= seen.insert(derive_seed(seed, i));
        }
        checks.push(Check::boolean(
            "seed-stream-distinct",
            distinct && derive_seed(0, 0) != derive_seed(0, 1),
            "collision-free over 10^6 indices",
        ));
    }
    {
        let config = ExperimentConfig {
            collision: CollisionConfig {
                seed: derive_seed(seed, 30),
                ..CollisionConfig::default()
            },
            n_samples: 128,
            strategy: Strategy::SaturationHunt,
            strat_axis: StratAxis::SSimple,
            n_bins: 8,
            hunt_rounds: 2,
            ..ExperimentConfig::default()
        };
        let bytes_with = |threads: usize| -> Result<Vec<u8>> {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| naqtur_core::Error::Config(e.to_string()))?;
            let records = pool.install(|| run(&config))?.records;
            let dir = std::env::temp_dir().join(format!("naqtur-verify-{}", std::process::id()));
            std::fs::create_dir_all(&dir)
                .map_err(|e| naqtur_core::Error::io(dir.display().to_string(), e))?;
            let path = dir.join(format!("det-{threads}.csv"));
            write_csv(&records, &path)?;
            let bytes = std::fs::read(&path)
                .map_err(|e| naqtur_core::Error::io(path.display().to_string(), e))?;
            Ok(bytes)
        };
        let same = bytes_with(1)? == bytes_with(2)?;
        checks.push(Check::boolean(
            "parallel-determinism",
            same,
            "hunt CSV bytes identical with 1 and 2 workers",
        ));
    }
    {
        // witness sentinel and h edge cases stay sane
        let ok = witness_h(0.0, 0.0, 0.0, 0.5) == 0.0
            && witness_h(0.2, 0.0, 0.0, 0.0).is_infinite();
        checks.push(Check::boolean(
            "witness-h-sentinels",
            ok,
            "zero-numerator and zero-denominator conventions",
        ));
    }
    {
        let rho = bloch_state(0.5, [0.0, 0.0, 1.0]).unwrap();
        let bad = UnitaryOperator::new(ComplexMatrix::identity(2).scale_re(0.9));
        checks.push(Check::boolean(
            "validation-guards",
            bad.is_err() && bloch_state(1.0, [0.0, 0.0, 1.0]).is_err() && rho.dim() == 2,
            "non-unitary matrices and r = 1 Bloch states are rejected",
        ));
    }

    // -- table -------------------------------------------------------------
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(10);
    let mut failures = 0;
    for c in &checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        if !c.passed {
            failures += 1;
        }
        println!(
            "[{status}] {:width$}  metric {:>9.2e}  tol {:>8.1e}  {}",
            c.name, c.metric, c.tolerance, c.detail
        );
    }
    println!(
        "verify: {}/{} checks passed in {:.2?}",
        checks.len() - failures,
        checks.len(),
        t0.elapsed()
    );
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
