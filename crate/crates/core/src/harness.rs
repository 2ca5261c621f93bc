//! Experiment orchestration: sampling strategies, binning, summary
//! statistics, persistence.
//!
//! Determinism contract: a master seed fixes every record. Samples are
//! derived by index, simulated in parallel with order-preserving collection,
//! and accepted sequentially, so the output CSV is byte-identical for any
//! worker count.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::collision::{
    collide_from_params, sample_params, simulate_one, CollisionConfig, CollisionParams,
    CollisionRecord, SystemDraw, SystemMode,
};
use crate::divergence::QuadratureRule;
use crate::error::{Error, Result};
use crate::linalg::random::normal_pair;
use crate::tur::SymMatrix;

/// Unflagged records with d_bath < bound - VIOLATION_TOL count as violations.
pub const VIOLATION_TOL: f64 = 1e-9;

/// Log-spaced stratification range of the chosen axis. Records falling
/// outside are not binned.
pub const STRAT_AXIS_MIN: f64 = 1e-4;
pub const STRAT_AXIS_MAX: f64 = 10.0;

/// Attempt budget of the stratified sampler: 10x the target per bin.
pub const STRAT_BUDGET_FACTOR: usize = 10;

/// Children spawned per kept record in each refinement round.
pub const HUNT_CHILDREN: usize = 2;

const SIM_CHUNK: usize = 512;

/// splitmix64 finalizer; a bijection on u64.
fn splitmix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    z
}

/// Per-sample seed stream: distinct indices give distinct seeds for a fixed
/// master (composition of bijections), with full avalanche in between.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add(splitmix64(
        index.wrapping_add(0x9E37_79B9_7F4A_7C15),
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    MonteCarlo,
    Stratified,
    SaturationHunt,
}

impl Strategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::MonteCarlo => "monte-carlo",
            Strategy::Stratified => "stratified",
            Strategy::SaturationHunt => "saturation-hunt",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monte-carlo" => Ok(Strategy::MonteCarlo),
            "stratified" => Ok(Strategy::Stratified),
            "saturation-hunt" => Ok(Strategy::SaturationHunt),
            other => Err(Error::Config(format!(
                "unknown strategy '{other}' (expected monte-carlo, stratified or saturation-hunt)"
            ))),
        }
    }
}

/// Which scalar the stratified bins partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StratAxis {
    #[serde(rename = "s_simple")]
    SSimple,
    #[serde(rename = "bound_B")]
    BoundB,
}

impl StratAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            StratAxis::SSimple => "s_simple",
            StratAxis::BoundB => "bound_B",
        }
    }

    fn value(&self, record: &CollisionRecord) -> f64 {
        match self {
            StratAxis::SSimple => record.s_simple,
            StratAxis::BoundB => record.bound,
        }
    }
}

impl fmt::Display for StratAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StratAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "s_simple" => Ok(StratAxis::SSimple),
            "bound_B" => Ok(StratAxis::BoundB),
            other => Err(Error::Config(format!(
                "unknown stratification axis '{other}' (expected s_simple or bound_B)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub collision: CollisionConfig,
    pub n_samples: usize,
    pub strategy: Strategy,
    pub strat_axis: StratAxis,
    pub n_bins: usize,
    pub hunt_rounds: usize,
    pub hunt_keep_fraction: f64,
    pub quadrature_order: usize,
    pub records_path: PathBuf,
    pub summary_path: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            collision: CollisionConfig::default(),
            n_samples: 1000,
            strategy: Strategy::MonteCarlo,
            strat_axis: StratAxis::SSimple,
            n_bins: 20,
            hunt_rounds: 3,
            hunt_keep_fraction: 0.2,
            quadrature_order: 64,
            records_path: PathBuf::from("records.csv"),
            summary_path: PathBuf::from("summary.json"),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.collision.validate()?;
        if self.n_samples < 1 {
            return Err(Error::Config("n_samples must be >= 1".into()));
        }
        if matches!(self.strategy, Strategy::Stratified | Strategy::SaturationHunt)
            && self.n_bins < 2
        {
            return Err(Error::Config(
                "stratified strategies need n_bins >= 2".into(),
            ));
        }
        if !(0.0 < self.hunt_keep_fraction && self.hunt_keep_fraction < 1.0) {
            return Err(Error::Config(
                "hunt_keep_fraction must lie in (0, 1)".into(),
            ));
        }
        if self.quadrature_order < 2 {
            return Err(Error::Config("quadrature_order must be >= 2".into()));
        }
        Ok(())
    }

    pub fn quadrature(&self) -> Result<QuadratureRule> {
        QuadratureRule::gauss_legendre(self.quadrature_order)
    }
}

/// A collision record plus its run-level identity.
#[derive(Debug, Clone)]
pub struct TaggedRecord {
    pub sample_id: u64,
    pub strategy: Strategy,
    pub round: u32,
    pub record: CollisionRecord,
}

/// Bin edges and fill counts of a stratified run.
#[derive(Debug, Clone, Serialize)]
pub struct BinReport {
    pub axis: StratAxis,
    pub edges: Vec<f64>,
    pub target_per_bin: usize,
    pub fill: Vec<usize>,
    pub attempts: u64,
}

impl BinReport {
    pub fn unreachable_bins(&self) -> Vec<usize> {
        self.fill
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == 0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Records plus optional stratification metadata.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<TaggedRecord>,
    pub stratification: Option<BinReport>,
}

/// Dispatch on the configured strategy.
pub fn run(config: &ExperimentConfig) -> Result<RunOutput> {
    config.validate()?;
    match config.strategy {
        Strategy::MonteCarlo => Ok(RunOutput {
            records: run_monte_carlo(config)?,
            stratification: None,
        }),
        Strategy::Stratified => {
            let (records, bins) = run_stratified(config)?;
            Ok(RunOutput {
                records,
                stratification: Some(bins),
            })
        }
        Strategy::SaturationHunt => {
            let (records, bins) = run_saturation_hunt(config)?;
            Ok(RunOutput {
                records,
                stratification: Some(bins),
            })
        }
    }
}

fn simulate_indexed(
    config: &ExperimentConfig,
    quad: &QuadratureRule,
    ids: std::ops::Range<u64>,
) -> Result<Vec<TaggedRecord>> {
    let master = config.collision.seed;
    let strategy = config.strategy;
    ids.collect::<Vec<u64>>()
        .par_iter()
        .map(|&id| {
            let record = simulate_one(&config.collision, quad, derive_seed(master, id))?;
            Ok(TaggedRecord {
                sample_id: id,
                strategy,
                round: 0,
                record,
            })
        })
        .collect()
}

/// Unbiased baseline: n_samples independent records with derived seeds.
pub fn run_monte_carlo(config: &ExperimentConfig) -> Result<Vec<TaggedRecord>> {
    config.validate()?;
    let quad = config.quadrature()?;
    simulate_indexed(config, &quad, 0..config.n_samples as u64)
}

fn log_edges(n_bins: usize) -> Vec<f64> {
    let ratio = STRAT_AXIS_MAX / STRAT_AXIS_MIN;
    (0..=n_bins)
        .map(|i| STRAT_AXIS_MIN * ratio.powf(i as f64 / n_bins as f64))
        .collect()
}

fn bin_of(edges: &[f64], value: f64) -> Option<usize> {
    if !value.is_finite() || value < edges[0] || value > edges[edges.len() - 1] {
        return None;
    }
    let idx = edges.partition_point(|&e| e <= value);
    Some(idx.saturating_sub(1).min(edges.len() - 2))
}

/// Oversample until every log-spaced bin of the chosen axis holds its target
/// count or the attempt budget runs out. Records outside every bin and
/// records beyond a full bin's target are discarded, which is what makes the
/// coverage uniform across decades.
pub fn run_stratified(config: &ExperimentConfig) -> Result<(Vec<TaggedRecord>, BinReport)> {
    config.validate()?;
    let quad = config.quadrature()?;
    let edges = log_edges(config.n_bins);
    let target = config.n_samples.div_ceil(config.n_bins);
    let budget = (STRAT_BUDGET_FACTOR * config.n_bins * target) as u64;

    let mut fill = vec![0usize; config.n_bins];
    let mut kept = Vec::new();
    let mut next_id = 0u64;
    while next_id < budget && fill.iter().any(|&c| c < target) {
        let chunk_end = (next_id + SIM_CHUNK as u64).min(budget);
        let batch = simulate_indexed(config, &quad, next_id..chunk_end)?;
        next_id = chunk_end;
        for tagged in batch {
            let axis = config.strat_axis.value(&tagged.record);
            if let Some(b) = bin_of(&edges, axis) {
                if fill[b] < target {
                    fill[b] += 1;
                    kept.push(tagged);
                }
            }
        }
    }
    let report = BinReport {
        axis: config.strat_axis,
        edges,
        target_per_bin: target,
        fill,
        attempts: next_id,
    };
    Ok((kept, report))
}

/// Jitter scales, halved each refinement round.
#[derive(Debug, Clone, Copy)]
struct JitterScale {
    r: f64,
    phi: f64,
    log_eps: f64,
    frame: f64,
}

impl JitterScale {
    fn initial(config: &CollisionConfig) -> Self {
        JitterScale {
            r: 0.1 * (config.r_max - config.r_min),
            phi: 0.1 * (config.phi_max - config.phi_min),
            log_eps: 0.5,
            frame: 0.2,
        }
    }

    fn halved(&self, round: u32) -> Self {
        let f = 0.5f64.powi(round as i32 - 1);
        JitterScale {
            r: self.r * f,
            phi: self.phi * f,
            log_eps: self.log_eps * f,
            frame: self.frame * f,
        }
    }
}

fn rotation_from_axis_angle(g: [f64; 3]) -> [[f64; 3]; 3] {
    let angle = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
    if angle < 1e-300 {
        return [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    }
    let k = [g[0] / angle, g[1] / angle, g[2] / angle];
    let (s, c) = angle.sin_cos();
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let eye = if i == j { 1.0 } else { 0.0 };
            let cross = match (i, j) {
                (0, 1) => -k[2],
                (0, 2) => k[1],
                (1, 0) => k[2],
                (1, 2) => -k[0],
                (2, 0) => -k[1],
                (2, 1) => k[0],
                _ => 0.0,
            };
            r[i][j] = eye * c + cross * s + (1.0 - c) * k[i] * k[j];
        }
    }
    r
}

fn mat3_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Gaussian jitter on r, phi, eps and the charge-frame angles; everything
/// else (Bloch direction, Haar draws) replays from the parent.
fn jitter_params(
    parent: &CollisionParams,
    config: &CollisionConfig,
    scale: JitterScale,
    rng: &mut ChaCha8Rng,
) -> CollisionParams {
    let mut params = parent.clone();
    let (g1, g2) = normal_pair(rng);
    params.r = (parent.r + scale.r * g1).clamp(config.r_min, config.r_max);
    params.phi = (parent.phi + scale.phi * g2).clamp(config.phi_min, config.phi_max);
    if let SystemDraw::SmallIsospectral { eps, axis } = &parent.system {
        let (g, _) = normal_pair(rng);
        params.system = SystemDraw::SmallIsospectral {
            eps: (eps * (scale.log_eps * g).exp()).clamp(config.eps_min, config.eps_max),
            axis: *axis,
        };
    }
    if let Some(frame) = &parent.frame {
        let (a, b) = normal_pair(rng);
        let (c, _) = normal_pair(rng);
        let small = rotation_from_axis_angle([scale.frame * a, scale.frame * b, scale.frame * c]);
        params.frame = Some(mat3_mul(&small, frame));
    }
    params
}

/// Stratified baseline, then `hunt_rounds` passes that keep the
/// smallest-slack fraction per bin, perturb their parameters with a
/// Gaussian jitter whose scale halves each round, and retain candidates
/// that improve on their parent. Output is the merged set tagged by round.
pub fn run_saturation_hunt(config: &ExperimentConfig) -> Result<(Vec<TaggedRecord>, BinReport)> {
    config.validate()?;
    let quad = config.quadrature()?;
    let (baseline, bins) = run_stratified(config)?;
    let edges = bins.edges.clone();
    let base_scale = JitterScale::initial(&config.collision);
    let master = config.collision.seed;

    struct Entry {
        tagged: TaggedRecord,
        params: CollisionParams,
    }

    let mut pool: Vec<Entry> = baseline
        .into_iter()
        .map(|tagged| {
            let mut rng = ChaCha8Rng::seed_from_u64(tagged.record.sample_seed);
            let params = sample_params(&config.collision, &mut rng);
            Entry { tagged, params }
        })
        .collect();
    let mut next_id = bins.attempts;
    let mut candidate_counter = 0u64;

    for round in 1..=config.hunt_rounds as u32 {
        let scale = base_scale.halved(round);

        // group unflagged pool entries by bin, keep the smallest-slack slice
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); config.n_bins];
        for (idx, entry) in pool.iter().enumerate() {
            if entry.tagged.record.is_flagged() {
                continue;
            }
            let axis = config.strat_axis.value(&entry.tagged.record);
            if let Some(b) = bin_of(&edges, axis) {
                groups[b].push(idx);
            }
        }
        let mut parents = Vec::new();
        for group in &mut groups {
            group.sort_by(|&a, &b| {
                pool[a]
                    .tagged
                    .record
                    .rel_slack
                    .total_cmp(&pool[b].tagged.record.rel_slack)
                    .then(pool[a].tagged.sample_id.cmp(&pool[b].tagged.sample_id))
            });
            let keep = ((group.len() as f64 * config.hunt_keep_fraction).ceil() as usize)
                .max(usize::from(!group.is_empty()));
            parents.extend(group.iter().take(keep).copied());
        }

        // jitter and evaluate children in parallel, deterministically seeded
        let jobs: Vec<(usize, u64, u64)> = parents
            .iter()
            .flat_map(|&p| {
                (0..HUNT_CHILDREN).map(move |c| (p, c as u64))
            })
            .enumerate()
            .map(|(offset, (p, _))| {
                let jitter_seed = derive_seed(
                    master ^ 0x48554E54u64.wrapping_mul(round as u64 + 1),
                    candidate_counter + offset as u64,
                );
                (p, jitter_seed, next_id + offset as u64)
            })
            .collect();
        candidate_counter += jobs.len() as u64;
        next_id += jobs.len() as u64;

        let children: Vec<(usize, CollisionParams, TaggedRecord)> = jobs
            .par_iter()
            .map(|&(parent_idx, jitter_seed, id)| {
                let mut rng = ChaCha8Rng::seed_from_u64(jitter_seed);
                let params =
                    jitter_params(&pool[parent_idx].params, &config.collision, scale, &mut rng);
                let record = collide_from_params(&config.collision, &params, &quad, jitter_seed)?;
                Ok((
                    parent_idx,
                    params,
                    TaggedRecord {
                        sample_id: id,
                        strategy: Strategy::SaturationHunt,
                        round,
                        record,
                    },
                ))
            })
            .collect::<Result<_>>()?;

        for (parent_idx, params, tagged) in children {
            let improves = !tagged.record.is_flagged()
                && tagged.record.rel_slack < pool[parent_idx].tagged.record.rel_slack;
            if improves {
                pool.push(Entry { tagged, params });
            }
        }
    }

    let mut records: Vec<TaggedRecord> = pool.into_iter().map(|e| e.tagged).collect();
    records.sort_by_key(|t| t.sample_id);
    Ok((records, bins))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Quantiles {
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

fn quantiles(values: &mut [f64]) -> Quantiles {
    values.sort_by(f64::total_cmp);
    let q = |p: f64| -> f64 {
        let idx = p * (values.len() - 1) as f64;
        let lo = idx.floor() as usize;
        let hi = idx.ceil() as usize;
        let t = idx - lo as f64;
        values[lo] * (1.0 - t) + values[hi] * t
    };
    Quantiles {
        min: values[0],
        q25: q(0.25),
        median: q(0.5),
        q75: q(0.75),
        max: values[values.len() - 1],
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BinAverage {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub mean_rel_slack: f64,
    pub stddev_rel_slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryStats {
    pub n_total: usize,
    pub n_flagged: usize,
    /// Unflagged records with d_bath < bound - VIOLATION_TOL. Zero on every
    /// valid run.
    pub n_violations: usize,
    pub gap_quantiles: Quantiles,
    pub rel_slack_quantiles: Quantiles,
    pub min_rel_slack: f64,
    pub rel_slack_robertson_correlation: f64,
    /// Binned running average of rel_slack against ||dq||, log-spaced bins.
    pub dq_norm_bins: Vec<BinAverage>,
}

/// Aggregate a record set. Flagged records are excluded from every
/// statistic except their own count.
pub fn summarize(records: &[TaggedRecord], n_bins: usize) -> Result<SummaryStats> {
    if records.is_empty() {
        return Err(Error::Empty("summarize needs at least one record".into()));
    }
    let clean: Vec<&TaggedRecord> = records
        .iter()
        .filter(|t| !t.record.is_flagged())
        .collect();
    let n_flagged = records.len() - clean.len();
    if clean.is_empty() {
        return Err(Error::Empty("every record is flagged".into()));
    }
    let n_violations = clean
        .iter()
        .filter(|t| t.record.d_bath < t.record.bound - VIOLATION_TOL)
        .count();

    let mut gaps: Vec<f64> = clean.iter().map(|t| t.record.gap_abs).collect();
    let mut slacks: Vec<f64> = clean.iter().map(|t| t.record.rel_slack).collect();
    let gap_quantiles = quantiles(&mut gaps);
    let rel_slack_quantiles = quantiles(&mut slacks);

    let corr = pearson(
        clean.iter().map(|t| t.record.rel_slack),
        clean.iter().map(|t| t.record.robertson_c),
        clean.len(),
    );

    let norms: Vec<f64> = clean.iter().map(|t| t.record.dq_norm()).collect();
    let lo = norms.iter().copied().filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min);
    let hi = norms.iter().copied().fold(0.0f64, f64::max);
    let mut dq_norm_bins = Vec::new();
    if lo.is_finite() && hi > lo {
        let ratio = hi / lo;
        let edge = |i: usize| lo * ratio.powf(i as f64 / n_bins as f64);
        for b in 0..n_bins {
            let (blo, bhi) = (edge(b), edge(b + 1));
            let members: Vec<f64> = clean
                .iter()
                .zip(&norms)
                .filter(|(_, &n)| n >= blo && (n < bhi || b == n_bins - 1))
                .map(|(t, _)| t.record.rel_slack)
                .collect();
            let count = members.len();
            let mean = if count > 0 {
                members.iter().sum::<f64>() / count as f64
            } else {
                f64::NAN
            };
            let var = if count > 1 {
                members.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (count - 1) as f64
            } else {
                0.0
            };
            dq_norm_bins.push(BinAverage {
                lo: blo,
                hi: bhi,
                count,
                mean_rel_slack: mean,
                stddev_rel_slack: var.sqrt(),
            });
        }
    }

    Ok(SummaryStats {
        n_total: records.len(),
        n_flagged,
        n_violations,
        gap_quantiles,
        min_rel_slack: rel_slack_quantiles.min,
        rel_slack_quantiles,
        rel_slack_robertson_correlation: corr,
        dq_norm_bins,
    })
}

fn pearson(
    xs: impl Iterator<Item = f64>,
    ys: impl Iterator<Item = f64>,
    n: usize,
) -> f64 {
    let pairs: Vec<(f64, f64)> = xs.zip(ys).collect();
    let nf = n as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in pairs {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// CSV column order; fixed, with a mandatory header row.
pub const CSV_COLUMNS: [&str; 30] = [
    "sample_id",
    "strategy",
    "round",
    "mode",
    "r",
    "phi",
    "eps",
    "k",
    "random_frame",
    "sigma",
    "mutual_info",
    "d_bath",
    "bound_B",
    "s_simple",
    "F_of_s",
    "gap_abs",
    "rel_slack",
    "cov_drift",
    "robertson_C",
    "dq_1",
    "dq_2",
    "V_11",
    "V_12",
    "V_22",
    "Vp_11",
    "Vp_12",
    "Vp_22",
    "range_residual",
    "flags",
    "sample_seed",
];

/// 17 significant digits: lossless f64 round-trip.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn record_row(t: &TaggedRecord) -> String {
    let r = &t.record;
    let fields: Vec<String> = vec![
        t.sample_id.to_string(),
        t.strategy.to_string(),
        t.round.to_string(),
        r.mode.to_string(),
        format_f64(r.r),
        format_f64(r.phi),
        format_f64(r.eps),
        r.k.to_string(),
        r.random_frame.to_string(),
        format_f64(r.sigma),
        format_f64(r.mutual_info),
        format_f64(r.d_bath),
        format_f64(r.bound),
        format_f64(r.s_simple),
        format_f64(r.f_of_s),
        format_f64(r.gap_abs),
        format_f64(r.rel_slack),
        format_f64(r.cov_drift),
        format_f64(r.robertson_c),
        format_f64(r.dq[0]),
        format_f64(r.dq[1]),
        format_f64(r.v.get(0, 0)),
        format_f64(r.v.get(0, 1)),
        format_f64(r.v.get(1, 1)),
        format_f64(r.v_prime.get(0, 0)),
        format_f64(r.v_prime.get(0, 1)),
        format_f64(r.v_prime.get(1, 1)),
        format_f64(r.range_residual),
        r.flags.clone(),
        r.sample_seed.to_string(),
    ];
    fields.join(",")
}

/// Write records in the fixed schema. Sorted by sample index first so the
/// bytes do not depend on how the run was parallelized.
pub fn write_csv(records: &[TaggedRecord], path: &Path) -> Result<()> {
    let mut sorted: Vec<&TaggedRecord> = records.iter().collect();
    sorted.sort_by_key(|t| t.sample_id);
    let mut out = String::with_capacity(64 + records.len() * 600);
    out.push_str(&CSV_COLUMNS.join(","));
    out.push('\n');
    for t in sorted {
        out.push_str(&record_row(t));
        out.push('\n');
    }
    let mut file =
        fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    file.write_all(out.as_bytes())
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(())
}

/// Read back a records CSV written by `write_csv`. The Bloch direction is
/// not persisted and comes back zeroed.
pub fn read_csv(path: &Path) -> Result<Vec<TaggedRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Empty(format!("{}: no header row", path.display())))?;
    let names: Vec<&str> = header.split(',').collect();
    if names != CSV_COLUMNS {
        let missing: Vec<&str> = CSV_COLUMNS
            .iter()
            .filter(|c| !names.contains(c))
            .copied()
            .collect();
        return Err(Error::Parse {
            path: path.display().to_string(),
            line: 1,
            message: format!("header mismatch; missing columns: {missing:?}"),
        });
    }
    let mut records = Vec::new();
    for (lineno, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != CSV_COLUMNS.len() {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line: lineno + 1,
                message: format!("expected {} fields, got {}", CSV_COLUMNS.len(), fields.len()),
            });
        }
        let parse_err = |message: String| Error::Parse {
            path: path.display().to_string(),
            line: lineno + 1,
            message,
        };
        let f = |i: usize| -> Result<f64> {
            fields[i]
                .parse::<f64>()
                .map_err(|e| parse_err(format!("{}: {e}", CSV_COLUMNS[i])))
        };
        let mut v = SymMatrix::zeros(2);
        v.set(0, 0, f(21)?);
        v.set(0, 1, f(22)?);
        v.set(1, 1, f(23)?);
        let mut vp = SymMatrix::zeros(2);
        vp.set(0, 0, f(24)?);
        vp.set(0, 1, f(25)?);
        vp.set(1, 1, f(26)?);
        records.push(TaggedRecord {
            sample_id: fields[0]
                .parse()
                .map_err(|e| parse_err(format!("sample_id: {e}")))?,
            strategy: fields[1].parse()?,
            round: fields[2]
                .parse()
                .map_err(|e| parse_err(format!("round: {e}")))?,
            record: CollisionRecord {
                mode: fields[3].parse::<SystemMode>()?,
                r: f(4)?,
                bloch_dir: [0.0; 3],
                phi: f(5)?,
                eps: f(6)?,
                k: fields[7]
                    .parse()
                    .map_err(|e| parse_err(format!("k: {e}")))?,
                random_frame: fields[8]
                    .parse()
                    .map_err(|e| parse_err(format!("random_frame: {e}")))?,
                sigma: f(9)?,
                mutual_info: f(10)?,
                d_bath: f(11)?,
                bound: f(12)?,
                s_simple: f(13)?,
                f_of_s: f(14)?,
                gap_abs: f(15)?,
                rel_slack: f(16)?,
                cov_drift: f(17)?,
                robertson_c: f(18)?,
                dq: vec![f(19)?, f(20)?],
                v,
                v_prime: vp,
                range_residual: f(27)?,
                flags: fields[28].to_string(),
                sample_seed: fields[29]
                    .parse()
                    .map_err(|e| parse_err(format!("sample_seed: {e}")))?,
            },
        });
    }
    Ok(records)
}

#[derive(Serialize)]
struct SummaryDocument<'a> {
    #[serde(flatten)]
    summary: &'a SummaryStats,
    config: &'a ExperimentConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    stratification: Option<&'a BinReport>,
}

/// Summary JSON: the stats fields at top level plus a config echo.
pub fn write_summary_json(
    stats: &SummaryStats,
    config: &ExperimentConfig,
    stratification: Option<&BinReport>,
    path: &Path,
) -> Result<()> {
    let doc = SummaryDocument {
        summary: stats,
        config,
        stratification,
    };
    let json = serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::Config(format!("summary serialization failed: {e}")))?;
    fs::write(path, json + "\n").map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(())
}
