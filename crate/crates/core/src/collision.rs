//! One-shot strong-coupling qubit collision simulator.
//!
//! Each sample prepares a polarized bath probe and a system qubit, applies a
//! partial swap composed with a bath-adapted fixed-point unitary, reduces,
//! and evaluates every per-collision scalar: entropy production, mutual
//! information, bath relative entropy, currents, covariances, and the bound.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::Serialize;

use crate::divergence::{relative_entropy, QuadratureRule};
use crate::error::{Error, Result};
use crate::linalg::eig::{hermitian_eig, phase_fix_columns};
use crate::linalg::matrix::{pauli_dot, tensor, ComplexMatrix};
use crate::linalg::random::{haar_su2, haar_unitary, uniform, unit_sphere};
use crate::linalg::states::{
    bloch_state, partial_trace, DensityMatrix, Keep, UnitaryOperator, DEFAULT_EIG_FLOOR,
};
use crate::tur::{
    bound_b, covariance_matrix, current_vector, robertson_c, ChargeSet, CurrentVector, SymMatrix,
    ROBERTSON_EPSILON,
};

/// How the system qubit is prepared relative to the bath probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemMode {
    /// rho_S = U rho_E U^dag with U Haar on SU(2).
    HaarIsospectral,
    /// rho_S = U(eps) rho_E U(eps)^dag, eps log-uniform; near-fixed-point
    /// control.
    SmallIsospectral,
    /// Fresh Bloch sample, fully generic nonequilibrium input.
    IndependentRandom,
}

impl SystemMode {
    pub const ALL: [SystemMode; 3] = [
        SystemMode::HaarIsospectral,
        SystemMode::SmallIsospectral,
        SystemMode::IndependentRandom,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SystemMode::HaarIsospectral => "haar-isospectral",
            SystemMode::SmallIsospectral => "small-isospectral",
            SystemMode::IndependentRandom => "independent-random",
        }
    }
}

impl fmt::Display for SystemMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SystemMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "haar-isospectral" => Ok(SystemMode::HaarIsospectral),
            "small-isospectral" => Ok(SystemMode::SmallIsospectral),
            "independent-random" => Ok(SystemMode::IndependentRandom),
            other => Err(Error::Config(format!(
                "unknown system mode '{other}' (expected haar-isospectral, \
                 small-isospectral or independent-random)"
            ))),
        }
    }
}

/// Sampling ranges and switches for one collision.
#[derive(Debug, Clone, Serialize)]
pub struct CollisionConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub phi_min: f64,
    pub phi_max: f64,
    pub system_mode: SystemMode,
    pub eps_min: f64,
    pub eps_max: f64,
    pub k: usize,
    pub random_frame: bool,
    pub use_fixed_point_unitary: bool,
    pub seed: u64,
}

impl Default for CollisionConfig {
    fn default() -> Self {
        CollisionConfig {
            r_min: 0.1,
            r_max: 0.95,
            phi_min: 0.05,
            phi_max: 1.57,
            system_mode: SystemMode::HaarIsospectral,
            // spans the quadratic regime through the onset of nonlinearity
            eps_min: 1e-3,
            eps_max: 0.3,
            k: 2,
            random_frame: true,
            use_fixed_point_unitary: true,
            seed: 0,
        }
    }
}

impl CollisionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.r_min && self.r_min <= self.r_max && self.r_max < 1.0) {
            return Err(Error::Config(format!(
                "need 0 < r_min <= r_max < 1, got [{}, {}]",
                self.r_min, self.r_max
            )));
        }
        if !(0.0 < self.phi_min && self.phi_min <= self.phi_max && self.phi_max <= FRAC_PI_2 + 1e-12)
        {
            return Err(Error::Config(format!(
                "need 0 < phi_min <= phi_max <= pi/2, got [{}, {}]",
                self.phi_min, self.phi_max
            )));
        }
        if !(0.0 < self.eps_min && self.eps_min <= self.eps_max) {
            return Err(Error::Config(format!(
                "need 0 < eps_min <= eps_max, got [{}, {}]",
                self.eps_min, self.eps_max
            )));
        }
        if self.k != 2 {
            return Err(Error::Unsupported(format!(
                "only k = 2 charges are supported, got {}",
                self.k
            )));
        }
        Ok(())
    }
}

/// Mode-specific part of a sampled parameter set.
#[derive(Debug, Clone)]
pub enum SystemDraw {
    HaarIsospectral { unitary: UnitaryOperator },
    SmallIsospectral { eps: f64, axis: [f64; 3] },
    IndependentRandom { r: f64, dir: [f64; 3] },
}

impl SystemDraw {
    pub fn eps(&self) -> f64 {
        match self {
            SystemDraw::SmallIsospectral { eps, .. } => *eps,
            _ => 0.0,
        }
    }
}

/// Raw draws for the bath-adapted fixed-point unitary.
#[derive(Debug, Clone)]
pub struct FixedPointDraw {
    pub alpha: f64,
    pub beta: f64,
    pub block: UnitaryOperator,
}

/// Every random choice of one collision, separated from the deterministic
/// evaluation so refinement strategies can replay and perturb them.
#[derive(Debug, Clone)]
pub struct CollisionParams {
    pub r: f64,
    pub bloch_dir: [f64; 3],
    /// None means the fixed (sigma_x/2, sigma_z/2) frame.
    pub frame: Option<[[f64; 3]; 3]>,
    pub system: SystemDraw,
    pub phi: f64,
    pub fixed_point: Option<FixedPointDraw>,
}

/// Scalars and provenance of one simulated collision.
#[derive(Debug, Clone)]
pub struct CollisionRecord {
    pub mode: SystemMode,
    pub r: f64,
    pub bloch_dir: [f64; 3],
    pub phi: f64,
    pub eps: f64,
    pub k: usize,
    pub random_frame: bool,
    /// Process-level entropy production Sigma.
    pub sigma: f64,
    /// Final mutual information between system and probe.
    pub mutual_info: f64,
    /// Bath relative entropy, the bounded quantity.
    pub d_bath: f64,
    /// The integral bound B(dq, V, V'); +inf sentinel when flagged.
    pub bound: f64,
    pub s_simple: f64,
    pub f_of_s: f64,
    /// d_bath - bound.
    pub gap_abs: f64,
    /// 1 - bound / d_bath.
    pub rel_slack: f64,
    /// ||V' - V||_F / ||V||_F.
    pub cov_drift: f64,
    pub robertson_c: f64,
    pub dq: Vec<f64>,
    pub v: SymMatrix,
    pub v_prime: SymMatrix,
    pub range_residual: f64,
    pub flags: String,
    pub sample_seed: u64,
}

impl CollisionRecord {
    pub fn is_flagged(&self) -> bool {
        !self.flags.is_empty()
    }

    pub fn dq_norm(&self) -> f64 {
        self.dq.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

pub const FLAG_OUT_OF_RANGE: &str = "out_of_range";

/// Bath probe state: Haar-uniform Bloch direction, radius from a mixture
/// that covers moderately mixed and near-pure regimes. With probability 1/2
/// the radius is uniform on [r_min, r_max], otherwise r_max - x with x
/// exponential of rate 10, resampled until it lands in range.
pub fn sample_bath<R: Rng + ?Sized>(
    config: &CollisionConfig,
    rng: &mut R,
) -> (DensityMatrix, f64, [f64; 3]) {
    let dir = unit_sphere(rng);
    let r = loop {
        if rng.random::<f64>() < 0.5 {
            break uniform(rng, config.r_min, config.r_max);
        }
        let x = -(1.0 - rng.random::<f64>()).ln() / 10.0;
        let candidate = config.r_max - x;
        if candidate >= config.r_min {
            break candidate;
        }
    };
    let rho = bloch_state(r, dir).expect("sampled radius and direction are valid");
    (rho, r, dir)
}

/// k = 2 charge observables; a random frame rotates (x_hat, z_hat) by a
/// uniform SO(3) element.
pub fn sample_charges<R: Rng + ?Sized>(
    k: usize,
    random_frame: bool,
    rng: &mut R,
) -> Result<ChargeSet> {
    if k != 2 {
        return Err(Error::Unsupported(format!(
            "only k = 2 charges are supported, got {k}"
        )));
    }
    Ok(if random_frame {
        ChargeSet::random_frame(rng)
    } else {
        ChargeSet::pauli_xz()
    })
}

/// Draw the mode-specific system parameters.
pub fn sample_system_draw<R: Rng + ?Sized>(
    mode: SystemMode,
    config: &CollisionConfig,
    rng: &mut R,
) -> SystemDraw {
    match mode {
        SystemMode::HaarIsospectral => SystemDraw::HaarIsospectral {
            unitary: haar_su2(rng),
        },
        SystemMode::SmallIsospectral => {
            let log_lo = config.eps_min.ln();
            let log_hi = config.eps_max.ln();
            let eps = (log_lo + (log_hi - log_lo) * rng.random::<f64>()).exp();
            SystemDraw::SmallIsospectral {
                eps,
                axis: unit_sphere(rng),
            }
        }
        SystemMode::IndependentRandom => {
            let dir = unit_sphere(rng);
            let r = loop {
                if rng.random::<f64>() < 0.5 {
                    break uniform(rng, config.r_min, config.r_max);
                }
                let x = -(1.0 - rng.random::<f64>()).ln() / 10.0;
                let candidate = config.r_max - x;
                if candidate >= config.r_min {
                    break candidate;
                }
            };
            SystemDraw::IndependentRandom { r, dir }
        }
    }
}

/// Deterministic system state from a draw.
pub fn system_state(draw: &SystemDraw, rho_e: &DensityMatrix) -> Result<DensityMatrix> {
    match draw {
        SystemDraw::HaarIsospectral { unitary } => unitary.evolve(rho_e),
        SystemDraw::SmallIsospectral { eps, axis } => {
            rotation_about(*axis, *eps).evolve(rho_e)
        }
        SystemDraw::IndependentRandom { r, dir } => bloch_state(*r, *dir),
    }
}

/// Spec-level convenience: draw and build in one step.
pub fn sample_system<R: Rng + ?Sized>(
    mode: SystemMode,
    rho_e: &DensityMatrix,
    config: &CollisionConfig,
    rng: &mut R,
) -> Result<DensityMatrix> {
    let draw = sample_system_draw(mode, config, rng);
    system_state(&draw, rho_e)
}

/// exp(-i theta (a . sigma) / 2) = cos(theta/2) I - i sin(theta/2) (a . sigma).
pub fn rotation_about(axis: [f64; 3], theta: f64) -> UnitaryOperator {
    let c = (theta / 2.0).cos();
    let s = (theta / 2.0).sin();
    let m = &ComplexMatrix::identity(2).scale_re(c)
        + &pauli_dot(axis).scale(Complex64::new(0.0, -s));
    UnitaryOperator::new(m).expect("qubit rotation is unitary")
}

/// SWAP on the 2x2 (x) 2x2 product space.
pub fn swap_gate() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4);
    let one = Complex64::new(1.0, 0.0);
    // |ij> -> |ji>
    m[(0, 0)] = one;
    m[(1, 2)] = one;
    m[(2, 1)] = one;
    m[(3, 3)] = one;
    m
}

/// Partial swap cos(phi) I - i sin(phi) SWAP; phi = pi/2 is a full swap up
/// to a global phase. phi = 0 is excluded from sampling but accepted here
/// for edge-case tests.
pub fn partial_swap(phi: f64) -> Result<UnitaryOperator> {
    if !(0.0..=FRAC_PI_2 + 1e-12).contains(&phi) {
        return Err(Error::InvalidParameter(format!(
            "swap angle must lie in [0, pi/2], got {phi}"
        )));
    }
    let m = &ComplexMatrix::identity(4).scale_re(phi.cos())
        + &swap_gate().scale(Complex64::new(0.0, -phi.sin()));
    UnitaryOperator::new(m)
}

/// Bath-adapted block unitary that preserves rho_E (x) rho_E exactly:
/// phases on the outer eigenstates, an arbitrary U(2) on the degenerate
/// {|01>, |10>} eigensubspace, conjugated back by W (x) W.
pub fn fixed_point_unitary<R: Rng + ?Sized>(
    rho_e: &DensityMatrix,
    rng: &mut R,
) -> UnitaryOperator {
    let draw = FixedPointDraw {
        alpha: uniform(rng, 0.0, 2.0 * PI),
        beta: uniform(rng, 0.0, 2.0 * PI),
        block: haar_unitary(2, rng),
    };
    fixed_point_unitary_from_draw(rho_e, &draw)
}

/// Deterministic construction from explicit draws. A degenerate bath
/// spectrum still works: the eigenbasis is fixed by sorting plus a phase
/// convention, and rho_E proportional to I is preserved by any unitary.
pub fn fixed_point_unitary_from_draw(
    rho_e: &DensityMatrix,
    draw: &FixedPointDraw,
) -> UnitaryOperator {
    let decomp = hermitian_eig(rho_e.hermitian());
    let w = phase_fix_columns(&decomp.eigenvectors);
    let mut block = ComplexMatrix::zeros(4);
    block[(0, 0)] = Complex64::from_polar(1.0, draw.alpha);
    block[(3, 3)] = Complex64::from_polar(1.0, draw.beta);
    for i in 0..2 {
        for j in 0..2 {
            block[(i + 1, j + 1)] = draw.block.matrix()[(i, j)];
        }
    }
    let ww = tensor(&w, &w);
    let m = &(&ww * &block) * &ww.adjoint();
    UnitaryOperator::new(m).expect("conjugated block unitary stays unitary")
}

/// U_SE = U_swap(phi) U_fp.
pub fn compose_interaction(phi: f64, u_fp: &UnitaryOperator) -> Result<UnitaryOperator> {
    let swap = partial_swap(phi)?;
    UnitaryOperator::new(swap.matrix() * u_fp.matrix())
}

/// Evolve the product input and reduce: (rho'_SE, rho'_S, rho'_E).
pub fn run_collision(
    rho_s: &DensityMatrix,
    rho_e: &DensityMatrix,
    u_se: &UnitaryOperator,
) -> Result<(DensityMatrix, DensityMatrix, DensityMatrix)> {
    if rho_s.dim() * rho_e.dim() != u_se.dim() {
        return Err(Error::DimensionMismatch(format!(
            "interaction acts on dim {}, states give {} x {}",
            u_se.dim(),
            rho_s.dim(),
            rho_e.dim()
        )));
    }
    let joint = DensityMatrix::new(tensor(rho_s.matrix(), rho_e.matrix()))?;
    let evolved = u_se.evolve(&joint)?;
    let reduced_s = partial_trace(&evolved, rho_s.dim(), rho_e.dim(), Keep::A)?;
    let reduced_e = partial_trace(&evolved, rho_s.dim(), rho_e.dim(), Keep::B)?;
    Ok((evolved, reduced_s, reduced_e))
}

/// Process-level entropy production
/// Sigma = D(rho'_SE || rho'_S (x) rho_E).
pub fn entropy_production(
    rho_se_out: &DensityMatrix,
    rho_s_out: &DensityMatrix,
    rho_e_in: &DensityMatrix,
    floor: f64,
) -> Result<f64> {
    let reference = DensityMatrix::new(tensor(rho_s_out.matrix(), rho_e_in.matrix()))?;
    relative_entropy(rho_se_out, &reference, floor)
}

/// I(S:E) = D(rho'_SE || rho'_S (x) rho'_E).
pub fn mutual_information(
    rho_se_out: &DensityMatrix,
    rho_s_out: &DensityMatrix,
    rho_e_out: &DensityMatrix,
) -> Result<f64> {
    let product = DensityMatrix::new(tensor(rho_s_out.matrix(), rho_e_out.matrix()))?;
    relative_entropy(rho_se_out, &product, DEFAULT_EIG_FLOOR)
}

/// Draw every random parameter of one collision, in a fixed order.
pub fn sample_params<R: Rng + ?Sized>(config: &CollisionConfig, rng: &mut R) -> CollisionParams {
    let (_, r, bloch_dir) = sample_bath(config, rng);
    let frame = if config.random_frame {
        Some(*ChargeSet::random_frame(rng).frame())
    } else {
        None
    };
    let system = sample_system_draw(config.system_mode, config, rng);
    let phi = uniform(rng, config.phi_min, config.phi_max);
    let fixed_point = config.use_fixed_point_unitary.then(|| FixedPointDraw {
        alpha: uniform(rng, 0.0, 2.0 * PI),
        beta: uniform(rng, 0.0, 2.0 * PI),
        block: haar_unitary(2, rng),
    });
    CollisionParams {
        r,
        bloch_dir,
        frame,
        system,
        phi,
        fixed_point,
    }
}

/// Deterministic evaluation of a parameter set into a full record.
pub fn collide_from_params(
    config: &CollisionConfig,
    params: &CollisionParams,
    quad: &QuadratureRule,
    sample_seed: u64,
) -> Result<CollisionRecord> {
    let rho_e = bloch_state(params.r, params.bloch_dir)?;
    let charges = match params.frame {
        Some(frame) => ChargeSet::from_frame(frame),
        None => ChargeSet::pauli_xz(),
    };
    let rho_s = system_state(&params.system, &rho_e)?;
    let u_fp = match &params.fixed_point {
        Some(draw) => fixed_point_unitary_from_draw(&rho_e, draw),
        None => UnitaryOperator::new(ComplexMatrix::identity(4))?,
    };
    let u_se = compose_interaction(params.phi, &u_fp)?;
    let (rho_se_out, rho_s_out, rho_e_out) = run_collision(&rho_s, &rho_e, &u_se)?;

    let sigma = entropy_production(&rho_se_out, &rho_s_out, &rho_e, DEFAULT_EIG_FLOOR)?;
    let mutual = mutual_information(&rho_se_out, &rho_s_out, &rho_e_out)?;
    let d_bath = relative_entropy(&rho_e_out, &rho_e, DEFAULT_EIG_FLOOR)?;

    let dq = current_vector(&rho_e, &rho_e_out, &charges);
    let v = covariance_matrix(&rho_e, &charges);
    let v_prime = covariance_matrix(&rho_e_out, &charges);
    let cov_drift = v_prime.sub(&v).frobenius_norm() / v.frobenius_norm();
    let incompat = robertson_c(
        &rho_e,
        &charges.charges()[0],
        &charges.charges()[1],
        ROBERTSON_EPSILON,
    );

    let report = bound_b(&dq, &v, &v_prime, quad);
    let mut flags = Vec::new();
    if report.out_of_range {
        flags.push(FLAG_OUT_OF_RANGE);
    }
    let rel_slack = if d_bath > 0.0 {
        1.0 - report.bound / d_bath
    } else {
        0.0
    };

    Ok(CollisionRecord {
        mode: config.system_mode,
        r: params.r,
        bloch_dir: params.bloch_dir,
        phi: params.phi,
        eps: params.system.eps(),
        k: config.k,
        random_frame: params.frame.is_some(),
        sigma,
        mutual_info: mutual,
        d_bath,
        bound: report.bound,
        s_simple: report.s_simple,
        f_of_s: report.f_of_s,
        gap_abs: d_bath - report.bound,
        rel_slack,
        cov_drift,
        robertson_c: incompat,
        dq: dq.components().to_vec(),
        v,
        v_prime,
        range_residual: report.range_residual,
        flags: flags.join(";"),
        sample_seed,
    })
}

/// Run the full pipeline for one derived seed. Identical (config, seed)
/// pairs produce identical records.
pub fn simulate_one(
    config: &CollisionConfig,
    quad: &QuadratureRule,
    sample_seed: u64,
) -> Result<CollisionRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(sample_seed);
    let params = sample_params(config, &mut rng);
    collide_from_params(config, &params, quad, sample_seed)
}

/// Current vector helper exposed for witness-style tests.
pub fn record_current(record: &CollisionRecord) -> CurrentVector {
    CurrentVector::new(record.dq.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::gauss_legendre;

    fn quad() -> QuadratureRule {
        gauss_legendre(64).unwrap()
    }

    #[test]
    fn partial_swap_limits() {
        let id = partial_swap(0.0).unwrap();
        assert!((id.matrix() - &ComplexMatrix::identity(4)).frobenius_norm() < 1e-15);
        let full = partial_swap(FRAC_PI_2).unwrap();
        let expect = swap_gate().scale(Complex64::new(0.0, -1.0));
        assert!((full.matrix() - &expect).frobenius_norm() < 1e-12);
        assert!(partial_swap(2.0).is_err());
        assert!(partial_swap(-0.1).is_err());
    }

    #[test]
    fn full_swap_exchanges_states() {
        let rho_s = bloch_state(0.7, [1.0, 0.0, 0.0]).unwrap();
        let rho_e = bloch_state(0.4, [0.0, 0.0, 1.0]).unwrap();
        let u = partial_swap(FRAC_PI_2).unwrap();
        let (_, out_s, out_e) = run_collision(&rho_s, &rho_e, &u).unwrap();
        assert!((out_e.matrix() - rho_s.matrix()).frobenius_norm() < 1e-12);
        assert!((out_s.matrix() - rho_e.matrix()).frobenius_norm() < 1e-12);
    }

    #[test]
    fn identity_collision_is_silent() {
        let rho_s = bloch_state(0.7, [1.0, 0.0, 0.0]).unwrap();
        let rho_e = bloch_state(0.4, [0.0, 0.6, 0.8]).unwrap();
        let u = UnitaryOperator::new(ComplexMatrix::identity(4)).unwrap();
        let (out, out_s, out_e) = run_collision(&rho_s, &rho_e, &u).unwrap();
        assert!((out_e.matrix() - rho_e.matrix()).frobenius_norm() < 1e-13);
        let sigma = entropy_production(&out, &out_s, &rho_e, DEFAULT_EIG_FLOOR).unwrap();
        assert!(sigma.abs() < 1e-12);
        let mi = mutual_information(&out, &out_s, &out_e).unwrap();
        assert!(mi.abs() < 1e-12);
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_state_mutual_information() {
        let mut m = ComplexMatrix::zeros(4);
        for &i in &[0usize, 3] {
            for &j in &[0usize, 3] {
                m[(i, j)] = Complex64::new(0.5, 0.0);
            }
        }
        let bell = DensityMatrix::new(m).unwrap();
        let ra = partial_trace(&bell, 2, 2, Keep::A).unwrap();
        let rb = partial_trace(&bell, 2, 2, Keep::B).unwrap();
        let mi = mutual_information(&bell, &ra, &rb).unwrap();
        assert!((mi - 2.0 * 2f64.ln()).abs() < 1e-9, "MI = {mi}");
    }

    #[test]
    fn fixed_point_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let config = CollisionConfig::default();
        for _ in 0..200 {
            let (rho_e, _, _) = sample_bath(&config, &mut rng);
            let u_fp = fixed_point_unitary(&rho_e, &mut rng);
            let joint = tensor(rho_e.matrix(), rho_e.matrix());
            let moved = u_fp.conjugate(&joint);
            assert!((&moved - &joint).frobenius_norm() <= 1e-12);
        }
    }

    #[test]
    fn fixed_point_trivial_draw_is_identity() {
        let rho_e = bloch_state(0.6, [0.6, 0.0, 0.8]).unwrap();
        let draw = FixedPointDraw {
            alpha: 0.0,
            beta: 0.0,
            block: UnitaryOperator::new(ComplexMatrix::identity(2)).unwrap(),
        };
        let u = fixed_point_unitary_from_draw(&rho_e, &draw);
        assert!((u.matrix() - &ComplexMatrix::identity(4)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn fixed_point_handles_degenerate_bath() {
        let rho_e = bloch_state(0.0, [0.0, 0.0, 1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u_fp = fixed_point_unitary(&rho_e, &mut rng);
        let joint = tensor(rho_e.matrix(), rho_e.matrix());
        assert!((&u_fp.conjugate(&joint) - &joint).frobenius_norm() < 1e-12);
    }

    #[test]
    fn compose_edge_cases() {
        let rho_e = bloch_state(0.5, [0.0, 1.0, 0.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let u_fp = fixed_point_unitary(&rho_e, &mut rng);
        let composed = compose_interaction(0.0, &u_fp).unwrap();
        assert!((composed.matrix() - u_fp.matrix()).frobenius_norm() < 1e-13);

        let id = UnitaryOperator::new(ComplexMatrix::identity(4)).unwrap();
        let pure_swap = compose_interaction(0.8, &id).unwrap();
        assert!(
            (pure_swap.matrix() - partial_swap(0.8).unwrap().matrix()).frobenius_norm() < 1e-14
        );
    }

    #[test]
    fn sample_bath_respects_range() {
        let config = CollisionConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5000 {
            let (_, r, dir) = sample_bath(&config, &mut rng);
            assert!((config.r_min..=config.r_max).contains(&r));
            let norm: f64 = dir.iter().map(|x| x * x).sum::<f64>();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sample_charges_rejects_other_k() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(sample_charges(3, true, &mut rng).is_err());
        assert!(sample_charges(2, false, &mut rng).is_ok());
    }

    #[test]
    fn isospectral_modes_preserve_spectrum() {
        let config = CollisionConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (rho_e, r, _) = sample_bath(&config, &mut rng);
        for mode in [SystemMode::HaarIsospectral, SystemMode::SmallIsospectral] {
            let rho_s = sample_system(mode, &rho_e, &config, &mut rng).unwrap();
            let eig = hermitian_eig(rho_s.hermitian());
            assert!((eig.eigenvalues[0] - (1.0 - r) / 2.0).abs() < 1e-12);
            assert!((eig.eigenvalues[1] - (1.0 + r) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn small_isospectral_stays_close() {
        let config = CollisionConfig {
            eps_min: 1e-3,
            eps_max: 1e-3,
            ..CollisionConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (rho_e, r, _) = sample_bath(&config, &mut rng);
        let rho_s = sample_system(SystemMode::SmallIsospectral, &rho_e, &config, &mut rng).unwrap();
        let dist = (rho_s.matrix() - rho_e.matrix()).frobenius_norm();
        assert!(dist <= 1e-3 * r + 1e-12, "dist {dist}");
    }

    #[test]
    fn simulate_one_deterministic() {
        let config = CollisionConfig::default();
        let q = quad();
        let a = simulate_one(&config, &q, 987654321).unwrap();
        let b = simulate_one(&config, &q, 987654321).unwrap();
        assert_eq!(a.sigma.to_bits(), b.sigma.to_bits());
        assert_eq!(a.bound.to_bits(), b.bound.to_bits());
        assert_eq!(a.dq, b.dq);
        let c = simulate_one(&config, &q, 987654322).unwrap();
        assert_ne!(a.sigma.to_bits(), c.sigma.to_bits());
    }

    #[test]
    fn chain_inequalities_across_modes() {
        let q = quad();
        for (seed_base, mode) in SystemMode::ALL.iter().enumerate() {
            let config = CollisionConfig {
                system_mode: *mode,
                seed: 0,
                ..CollisionConfig::default()
            };
            for i in 0..300u64 {
                let rec = simulate_one(&config, &q, 1000 * seed_base as u64 + i).unwrap();
                assert!(rec.flags.is_empty(), "unexpected flag {:?}", rec.flags);
                assert!(
                    rec.d_bath >= rec.bound - 1e-9,
                    "bound violation: D={} B={}",
                    rec.d_bath,
                    rec.bound
                );
                assert!(rec.sigma >= rec.d_bath - 1e-12);
                assert!((rec.sigma - rec.mutual_info - rec.d_bath).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn small_isospectral_has_small_drift() {
        let config = CollisionConfig {
            system_mode: SystemMode::SmallIsospectral,
            eps_min: 1e-3,
            eps_max: 1e-3,
            ..CollisionConfig::default()
        };
        let q = quad();
        for i in 0..100u64 {
            let rec = simulate_one(&config, &q, i).unwrap();
            assert!(rec.cov_drift < 1e-2, "drift {}", rec.cov_drift);
            assert!((rec.eps - 1e-3).abs() < 1e-15);
        }
    }

    #[test]
    fn commuting_in_plane_configuration_saturates() {
        // bath and system diagonal in the same basis, direction inside the
        // charge plane: the bound meets the bath relative entropy exactly
        let rho_e = bloch_state(0.6, [1.0, 0.0, 0.0]).unwrap();
        let rho_s = bloch_state(0.3, [1.0, 0.0, 0.0]).unwrap();
        let u = partial_swap(0.9).unwrap();
        let (_, _, rho_e_out) = run_collision(&rho_s, &rho_e, &u).unwrap();
        let charges = ChargeSet::pauli_xz();
        let dq = current_vector(&rho_e, &rho_e_out, &charges);
        let v = covariance_matrix(&rho_e, &charges);
        let vp = covariance_matrix(&rho_e_out, &charges);
        let report = bound_b(&dq, &v, &vp, &quad());
        let d_bath = relative_entropy(&rho_e_out, &rho_e, DEFAULT_EIG_FLOOR).unwrap();
        assert!(
            (d_bath - report.bound).abs() < 1e-12,
            "gap {:e}",
            d_bath - report.bound
        );
    }

    #[test]
    fn config_validation() {
        let mut c = CollisionConfig::default();
        assert!(c.validate().is_ok());
        c.r_min = 0.0;
        assert!(c.validate().is_err());
        c = CollisionConfig::default();
        c.phi_max = 2.0;
        assert!(c.validate().is_err());
        c = CollisionConfig::default();
        c.k = 3;
        assert!(c.validate().is_err());
    }

    #[test]
    fn mode_strings_roundtrip() {
        for mode in SystemMode::ALL {
            assert_eq!(mode.as_str().parse::<SystemMode>().unwrap(), mode);
        }
        assert!("nope".parse::<SystemMode>().is_err());
    }
}
