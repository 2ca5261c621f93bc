//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (visible with `cargo test --test acceptance -- --nocapture`).

mod common;

use std::time::Instant;

use common::{classical_kl, pass, random_pair, record_pool, simpson};
use naqtur_core::collision::{
    fixed_point_unitary, sample_bath, simulate_one, CollisionConfig, SystemMode,
};
use naqtur_core::divergence::{
    f_divergence_via_weights, gauss_legendre, relative_entropy, WeightFunction,
};
use naqtur_core::harness::{run, write_csv, ExperimentConfig, StratAxis, Strategy, VIOLATION_TOL};
use naqtur_core::linalg::matrix::tensor;
use naqtur_core::linalg::states::{bloch_state, DEFAULT_EIG_FLOOR};
use naqtur_core::linalg::uniform;
use naqtur_core::tur::{
    bound_b, f_closed, g_of_d, matrix_tur_check, robertson_c, s_lambda, witness_bound_integral,
    ChargeSet, CurrentVector, SymMatrix, PINV_RELATIVE_CUTOFF, ROBERTSON_EPSILON,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn c01_bound_validity_at_scale() {
    let pool = record_pool();
    assert!(pool.len() >= 10_000, "pool holds {} records", pool.len());

    let mut bound_violations = 0usize;
    let mut sigma_violations = 0usize;
    let mut flagged = 0usize;
    for t in pool {
        if t.record.is_flagged() {
            flagged += 1;
            continue;
        }
        if t.record.d_bath < t.record.bound - VIOLATION_TOL {
            bound_violations += 1;
        }
        if t.record.sigma < t.record.d_bath - 1e-12 {
            sigma_violations += 1;
        }
    }
    assert_eq!(bound_violations, 0, "D_bath >= B - 1e-9 must hold unflagged");
    assert_eq!(sigma_violations, 0, "Sigma >= D_bath - 1e-12 must hold");

    // runtime target: 10^4 collisions single-threaded
    let quad = gauss_legendre(64).unwrap();
    let config = CollisionConfig::default();
    let t0 = Instant::now();
    for i in 0..10_000u64 {
        simulate_one(&config, &quad, i).unwrap();
    }
    let elapsed = t0.elapsed();
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "10^4 collisions took {elapsed:?}"
    );
    pass(
        "01 (bound validity at scale)",
        format!(
            "{} records, 0 bound violations, 0 sigma violations, {} flagged; 10^4 single-threaded collisions in {elapsed:?}",
            pool.len(),
            flagged
        ),
    );
}

#[test]
fn c02_split_identity() {
    let pool = record_pool();
    let worst = pool
        .iter()
        .map(|t| (t.record.sigma - t.record.mutual_info - t.record.d_bath).abs())
        .fold(0.0f64, f64::max);
    assert!(worst <= 1e-10, "worst split residual {worst:e}");
    pass(
        "02 (split identity)",
        format!("|Sigma - I - D_bath| <= {worst:.2e} on {} records (tol 1e-10)", pool.len()),
    );
}

#[test]
fn c03_kl_integral_representation() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC3);
    let quad64 = gauss_legendre(64).unwrap();
    let mut worst_scaled = 0.0f64;
    let mut pairs = Vec::new();
    for _ in 0..1000 {
        let (rho, sigma) = random_pair(&mut rng);
        let d = relative_entropy(&rho, &sigma, DEFAULT_EIG_FLOOR).unwrap();
        let (via, _) = f_divergence_via_weights(&rho, &sigma, &WeightFunction::Kl, &quad64);
        let tol = 1e-8f64.max(1e-6 * d);
        let resid = (via - d).abs();
        assert!(resid <= tol, "residual {resid:e} exceeds {tol:e} at D = {d}");
        worst_scaled = worst_scaled.max(resid / tol);
        pairs.push((rho, sigma, d));
    }

    // commuting pairs: both the log route and the weight integral must land
    // on the classical value
    for (ra, rb) in [(0.2, 0.6), (0.9, 0.15), (0.5, 0.5001)] {
        let rho = bloch_state(ra, [0.0, 0.0, 1.0]).unwrap();
        let sigma = bloch_state(rb, [0.0, 0.0, 1.0]).unwrap();
        let oracle = classical_kl(
            &[(1.0 + ra) / 2.0, (1.0 - ra) / 2.0],
            &[(1.0 + rb) / 2.0, (1.0 - rb) / 2.0],
        );
        let d = relative_entropy(&rho, &sigma, DEFAULT_EIG_FLOOR).unwrap();
        let (via, _) = f_divergence_via_weights(&rho, &sigma, &WeightFunction::Kl, &quad64);
        assert!((d - oracle).abs() <= 1e-13);
        assert!((via - oracle).abs() <= 1e-8f64.max(1e-6 * oracle));
    }

    // convergence under order doubling, allowing the f64 noise floor once
    // the quadrature is exact to machine precision
    let median_residual = |order: usize| -> f64 {
        let quad = gauss_legendre(order).unwrap();
        let mut residuals: Vec<f64> = pairs
            .iter()
            .map(|(rho, sigma, d)| {
                (f_divergence_via_weights(rho, sigma, &WeightFunction::Kl, &quad).0 - d).abs()
            })
            .collect();
        residuals.sort_by(f64::total_cmp);
        residuals[residuals.len() / 2]
    };
    let m32 = median_residual(32);
    let m64 = median_residual(64);
    let m128 = median_residual(128);
    assert!(m64 <= m32 + 5e-15, "median 64 = {m64:e} vs 32 = {m32:e}");
    assert!(m128 <= m64 + 5e-15, "median 128 = {m128:e} vs 64 = {m64:e}");
    pass(
        "03 (KL integral representation)",
        format!(
            "10^3 pairs within tolerance (worst at {:.1}% of budget); medians 32/64/128 = {m32:.1e}/{m64:.1e}/{m128:.1e}",
            100.0 * worst_scaled
        ),
    );
}

#[test]
fn c04_closed_form_collapse() {
    let quad = gauss_legendre(64).unwrap();
    let shapes = [
        SymMatrix::diagonal(&[0.25, 0.25]),
        SymMatrix::from_rows_symmetrized(&[vec![0.3, 0.08], vec![0.08, 0.15]]),
        SymMatrix::from_rows_symmetrized(&[vec![0.05, -0.01], vec![-0.01, 0.22]]),
    ];
    let direction = [0.6, -0.8];
    let mut worst = 0.0f64;
    for v in &shapes {
        let base = CurrentVector::new(direction.to_vec());
        let (s0, _) = s_lambda(&base, v, v, 0.5, PINV_RELATIVE_CUTOFF);
        let mut s = 1e-4;
        while s <= 100.0 {
            let scale = (s / s0).sqrt();
            let dq = CurrentVector::new(direction.iter().map(|x| x * scale).collect());
            let report = bound_b(&dq, v, v, &quad);
            let expect = f_closed(report.s_simple).unwrap();
            let resid = (report.bound - expect).abs();
            assert!(resid <= 1e-8, "s = {s}: residual {resid:e}");
            worst = worst.max(resid);
            s *= 1.9;
        }
    }
    pass(
        "04 (closed-form collapse)",
        format!("|B - F(s)| <= {worst:.2e} over s in [1e-4, 1e2], three covariance shapes (tol 1e-8)"),
    );
}

#[test]
fn c05_small_s_expansion_and_onsager_form() {
    // part (a): the closed form against its quadratic truncation, with the
    // truncation residual verified against an independent Simpson oracle
    let mut worst_ratio = 0.0f64;
    let mut s = 1e-4;
    while s <= 0.1 {
        let f = f_closed(s).unwrap();
        let oracle = simpson(
            |l| l * s / (1.0 + l * (1.0 - l) * s),
            0.0,
            1.0,
            20_000,
        );
        assert!((f - oracle).abs() <= 1e-12 * s.max(1e-6));
        let resid = (f - (s / 2.0 - s * s / 12.0)).abs();
        assert!(resid <= 0.02 * s * s * s, "s = {s}: residual {resid:e}");
        worst_ratio = worst_ratio.max(resid / (s * s * s));
        s *= 1.7;
    }
    pass(
        "05a (small-s expansion)",
        format!("|F(s) - (s/2 - s^2/12)| <= {worst_ratio:.4} * s^3 for s <= 0.1 (tol 0.02 s^3)"),
    );

    // part (b): Onsager form on small-isospectral records. The literal
    // reading |B - s/2| <= s^2 fails: with V' - V = Theta(eps) the
    // difference carries a Theta(s^(3/2)) cross term
    // (1/6) (V^-1 dq)^T (V' - V) (V^-1 dq), which dominates s^2 as eps
    // shrinks. Reported honestly below, asserted with the cross term
    // included; see the README notes on bound accuracy.
    let pool = record_pool();
    let mut n_small = 0usize;
    let mut n_literal_pass = 0usize;
    let mut worst_literal = 0.0f64;
    let mut worst_corrected = 0.0f64;
    for t in pool {
        let r = &t.record;
        if r.mode != SystemMode::SmallIsospectral || r.is_flagged() || r.dq_norm() > 1e-2 {
            continue;
        }
        n_small += 1;
        let s = r.s_simple;
        if s <= 0.0 {
            continue;
        }
        let lhs = (r.bound - s / 2.0).abs();
        if lhs <= s * s {
            n_literal_pass += 1;
        }
        worst_literal = worst_literal.max(lhs / (s * s));
        // corrected budget: quadratic term plus the covariance-drift cross
        // term through w = V^-1 dq
        let eig = r.v.eig();
        let dq = CurrentVector::new(r.dq.clone());
        let mut w = [0.0; 2];
        for (value, vector) in eig.values.iter().zip(&eig.vectors) {
            let proj: f64 = vector.iter().zip(&r.dq).map(|(a, b)| a * b).sum();
            for (wi, vi) in w.iter_mut().zip(vector) {
                *wi += proj / value * vi;
            }
        }
        let dv = r.v_prime.sub(&r.v);
        let w_norm_sqr: f64 = w.iter().map(|x| x * x).sum();
        let budget = s * s / 12.0 + 0.5 * w_norm_sqr * dv.frobenius_norm() + 1e-13;
        let _ = matrix_tur_check(&r.v, &dq, r.d_bath.max(1e-300));
        assert!(
            lhs <= budget,
            "corrected Onsager budget exceeded: |B - s/2| = {lhs:e}, budget {budget:e}"
        );
        worst_corrected = worst_corrected.max(lhs / budget);
    }
    assert!(n_small > 100, "only {n_small} small-current records");
    let frac = n_literal_pass as f64 / n_small as f64;
    if frac < 1.0 {
        println!(
            "acceptance 05b (Onsager form, literal |B - s/2| <= s^2): FAIL - holds for only \
             {:.1}% of {n_small} small-isospectral records (worst ratio {worst_literal:.1e}); \
             the covariance-drift cross term is Theta(s^(3/2)), so the stated O(s^2) envelope \
             cannot hold as eps -> 0. Non-fatal by design; see decisions ledger.",
            100.0 * frac
        );
    } else {
        pass("05b (Onsager form, literal)", format!("{n_small} records within s^2"));
    }
    pass(
        "05b (Onsager form, drift-corrected)",
        format!(
            "|B - s/2| <= s^2/12 + |w^T (V'-V) w| budget on all {n_small} records (worst at {:.0}% of budget)",
            100.0 * worst_corrected
        ),
    );
}

#[test]
fn c06_inverse_pair() {
    let mut worst = 0.0f64;
    let mut d = 1e-6;
    while d <= 10.0 {
        let back = f_closed(g_of_d(d).unwrap()).unwrap();
        let resid = (back - d).abs();
        assert!(resid <= 1e-10, "D = {d}: |F(G(D)) - D| = {resid:e}");
        worst = worst.max(resid);
        d *= 1.8;
    }
    let spot = g_of_d(2.0 * 1f64.tanh()).unwrap();
    let expect = 4.0 * 1f64.sinh().powi(2);
    assert!((spot - expect).abs() <= 1e-9);
    pass(
        "06 (inverse pair)",
        format!("|F(G(D)) - D| <= {worst:.2e} on log grid [1e-6, 10]; G(2 tanh 1) matches 4 sinh^2(1)"),
    );
}

#[test]
fn c07_psd_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC7);
    let mut checked = 0usize;
    let mut boundary = 0usize;
    for _ in 0..1000 {
        // random PSD covariance, bounded away from singular
        let a = [
            uniform(&mut rng, -1.0, 1.0),
            uniform(&mut rng, -1.0, 1.0),
            uniform(&mut rng, -1.0, 1.0),
            uniform(&mut rng, -1.0, 1.0),
        ];
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
        // center D on the equality boundary so both signs get exercised
        let d = f_closed(s).unwrap() * uniform(&mut rng, 0.6, 1.6);
        let g = g_of_d(d).unwrap();
        let min_eig = matrix_tur_check(&v, &dq, d).unwrap();
        if (g - s).abs() <= 1e-10 {
            boundary += 1;
            continue;
        }
        if g > s {
            assert!(min_eig >= -1e-10, "expected PSD: min eig {min_eig:e}, G - s = {:e}", g - s);
        } else {
            assert!(min_eig <= 1e-10, "expected indefinite: min eig {min_eig:e}, s - G = {:e}", s - g);
        }
        checked += 1;
    }
    assert!(checked >= 900);
    pass(
        "07 (PSD equivalence)",
        format!("sign agreement on {checked} random triples ({boundary} within the 1e-10 boundary band)"),
    );
}

#[test]
fn c08_witness_dominance() {
    let config = ExperimentConfig {
        collision: CollisionConfig {
            seed: 0xC8,
            ..CollisionConfig::default()
        },
        n_samples: 1000,
        strategy: Strategy::MonteCarlo,
        ..ExperimentConfig::default()
    };
    let records = run(&config).unwrap().records;
    let quad = gauss_legendre(64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC8C8);
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_opt_gap = 0.0f64;
    for t in &records {
        let r = &t.record;
        let dq = CurrentVector::new(r.dq.clone());
        for _ in 0..100 {
            let u = [uniform(&mut rng, -1.0, 1.0), uniform(&mut rng, -1.0, 1.0)];
            let w = witness_bound_integral(&u, &dq, &r.v, &r.v_prime, &quad);
            let excess = w - r.bound;
            assert!(excess <= 1e-12, "witness exceeds bound by {excess:e}");
            worst_excess = worst_excess.max(excess);
        }
        // Lemma-2 optimizer attains the bound when V' = V
        let symmetric = bound_b(&dq, &r.v, &r.v, &quad);
        let eig = r.v.eig();
        let mut u_opt = vec![0.0; 2];
        for (value, vector) in eig.values.iter().zip(&eig.vectors) {
            let proj: f64 = vector.iter().zip(&r.dq).map(|(a, b)| a * b).sum();
            for (ui, vi) in u_opt.iter_mut().zip(vector) {
                *ui += proj / value * vi;
            }
        }
        let attained = witness_bound_integral(&u_opt, &dq, &r.v, &r.v, &quad);
        let gap = (attained - symmetric.bound).abs();
        assert!(gap <= 1e-10, "optimizer gap {gap:e}");
        worst_opt_gap = worst_opt_gap.max(gap);
    }
    pass(
        "08 (witness dominance)",
        format!(
            "10^5 record/direction pairs dominated (max excess {worst_excess:.1e} <= 1e-12); optimizer gap <= {worst_opt_gap:.1e} at V' = V"
        ),
    );
}

#[test]
fn c09_robertson_ratio() {
    let pool = record_pool();
    for t in pool {
        let c = t.record.robertson_c;
        assert!(
            (-1e-12..=1.0 + 1e-9).contains(&c),
            "Robertson ratio {c} outside [0, 1 + 1e-9]"
        );
    }
    // constructed case: rho = (I + r sigma_y)/2 against (sigma_x, sigma_z)/2
    let charges = ChargeSet::pauli_xz();
    let mut worst = 0.0f64;
    for k in 0..20 {
        let r = k as f64 * 0.05;
        let rho = bloch_state(r, [0.0, 1.0, 0.0]).unwrap();
        let c = robertson_c(
            &rho,
            &charges.charges()[0],
            &charges.charges()[1],
            ROBERTSON_EPSILON,
        );
        assert!((c - r).abs() <= 1e-12);
        worst = worst.max((c - r).abs());
    }
    pass(
        "09 (Robertson ratio)",
        format!("C in [0, 1+1e-9] on {} records; constructed case |C - r| <= {worst:.1e}", pool.len()),
    );
}

#[test]
fn c10_fixed_point_unitary() {
    let config = CollisionConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC10);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (rho_e, _, _) = sample_bath(&config, &mut rng);
        let u_fp = fixed_point_unitary(&rho_e, &mut rng);
        let joint = tensor(rho_e.matrix(), rho_e.matrix());
        let dev = (&u_fp.conjugate(&joint) - &joint).frobenius_norm();
        assert!(dev <= 1e-12, "fixed-point deviation {dev:e}");
        worst = worst.max(dev);
    }
    pass(
        "10 (fixed-point unitary)",
        format!("||U (rho x rho) U^dag - rho x rho||_F <= {worst:.2e} on 10^3 draws (tol 1e-12)"),
    );
}

#[test]
fn c11_figure_scale_reproduction() {
    // Fig. 1 style: unbiased n = 10^3 cloud sits on or above the diagonal
    let config = ExperimentConfig {
        collision: CollisionConfig {
            seed: 0xF161,
            ..CollisionConfig::default()
        },
        n_samples: 1000,
        strategy: Strategy::MonteCarlo,
        ..ExperimentConfig::default()
    };
    let records = run(&config).unwrap().records;
    assert_eq!(records.len(), 1000);
    for t in &records {
        assert!(!t.record.is_flagged());
        assert!(t.record.d_bath >= t.record.bound - VIOLATION_TOL);
    }

    // Fig. 2 style: the hunt populates the near-saturated cloud
    let hunt_config = ExperimentConfig {
        collision: CollisionConfig {
            seed: 0xF162,
            ..CollisionConfig::default()
        },
        n_samples: 1000,
        strategy: Strategy::SaturationHunt,
        strat_axis: StratAxis::SSimple,
        n_bins: 20,
        hunt_rounds: 3,
        ..ExperimentConfig::default()
    };
    let hunted = run(&hunt_config).unwrap().records;
    let near = hunted
        .iter()
        .filter(|t| !t.record.is_flagged() && t.record.rel_slack < 0.05)
        .count();
    let frac = near as f64 / hunted.len() as f64;
    assert!(
        frac >= 0.01,
        "only {near}/{} hunted records reach rel_slack < 0.05",
        hunted.len()
    );
    pass(
        "11 (figure-scale reproduction)",
        format!(
            "10^3 unbiased records all on/above the diagonal; hunt reaches rel_slack < 0.05 on {:.1}% of {} records (needs >= 1%)",
            100.0 * frac,
            hunted.len()
        ),
    );
}

#[test]
fn c12_determinism_across_worker_counts() {
    let config = ExperimentConfig {
        collision: CollisionConfig {
            seed: 0xDE7,
            ..CollisionConfig::default()
        },
        n_samples: 400,
        strategy: Strategy::SaturationHunt,
        n_bins: 10,
        hunt_rounds: 2,
        ..ExperimentConfig::default()
    };
    let bytes_with = |threads: usize| -> Vec<u8> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let records = pool.install(|| run(&config).unwrap().records);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.csv");
        write_csv(&records, &path).unwrap();
        std::fs::read(&path).unwrap()
    };
    let single = bytes_with(1);
    let multi = bytes_with(4);
    assert_eq!(single, multi, "CSV bytes differ across worker counts");
    pass(
        "12 (determinism)",
        format!("byte-identical CSV ({} bytes) with 1 and 4 workers", single.len()),
    );
}
