//! The `simulate` subcommand: resolve configuration, run the chosen
//! strategy, persist records and summary.

use std::path::PathBuf;
use std::process::ExitCode;

use naqtur_core::harness::{run, summarize, write_csv, write_summary_json, ExperimentConfig};
use naqtur_core::{Error, Result};

use crate::SimulateArgs;

fn resolve_output(base: &Option<PathBuf>, path: &PathBuf) -> PathBuf {
    match base {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.clone(),
    }
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<ExitCode> {
    let mut config = ExperimentConfig::default();
    let file_keys = match &args.config {
        Some(path) => crate::config_file::apply_file(&mut config, path)?,
        None => Default::default(),
    };

    let file_seed = file_keys.contains("seed").then_some(config.collision.seed);
    config.collision.seed = crate::resolve_seed(args.seed, file_seed)?;

    if let Some(n) = args.n_samples {
        config.n_samples = n;
    }
    if let Some(s) = &args.strategy {
        config.strategy = s.parse()?;
    }
    if let Some(m) = &args.mode {
        config.collision.system_mode = m.parse()?;
    }
    if let Some(x) = args.r_min {
        config.collision.r_min = x;
    }
    if let Some(x) = args.r_max {
        config.collision.r_max = x;
    }
    if let Some(x) = args.phi_min {
        config.collision.phi_min = x;
    }
    if let Some(x) = args.phi_max {
        config.collision.phi_max = x;
    }
    if let Some(x) = args.eps_min {
        config.collision.eps_min = x;
    }
    if let Some(x) = args.eps_max {
        config.collision.eps_max = x;
    }
    if let Some(k) = args.k {
        config.collision.k = k;
    }
    if let Some(b) = args.random_frame {
        config.collision.random_frame = b;
    }
    if let Some(b) = args.fixed_point {
        config.collision.use_fixed_point_unitary = b;
    }
    if let Some(a) = &args.strat_axis {
        config.strat_axis = a.parse()?;
    }
    if let Some(x) = args.n_bins {
        config.n_bins = x;
    }
    if let Some(x) = args.hunt_rounds {
        config.hunt_rounds = x;
    }
    if let Some(x) = args.hunt_keep_fraction {
        config.hunt_keep_fraction = x;
    }
    if let Some(x) = args.quadrature_order {
        config.quadrature_order = x;
    }
    if let Some(p) = &args.records {
        config.records_path = p.clone();
    }
    if let Some(p) = &args.summary {
        config.summary_path = p.clone();
    }
    config.records_path = resolve_output(&args.out_dir, &config.records_path);
    config.summary_path = resolve_output(&args.out_dir, &config.summary_path);
    config.validate()?;
    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    }

    println!("master seed: {}", config.collision.seed);
    println!(
        "strategy: {} | mode: {} | n_samples: {} | quadrature order: {}",
        config.strategy, config.collision.system_mode, config.n_samples, config.quadrature_order
    );

    let output = match args.workers {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
            pool.install(|| run(&config))?
        }
        None => run(&config)?,
    };

    let stats = summarize(&output.records, config.n_bins)?;
    write_csv(&output.records, &config.records_path)?;
    write_summary_json(
        &stats,
        &config,
        output.stratification.as_ref(),
        &config.summary_path,
    )?;

    if let Some(bins) = &output.stratification {
        let unreachable = bins.unreachable_bins();
        println!(
            "stratification: {} bins over [{:.1e}, {:.1e}] of {}, target {}/bin, {} attempts{}",
            bins.fill.len(),
            bins.edges[0],
            bins.edges[bins.edges.len() - 1],
            bins.axis,
            bins.target_per_bin,
            bins.attempts,
            if unreachable.is_empty() {
                String::new()
            } else {
                format!(", unreachable bins {unreachable:?}")
            }
        );
    }
    println!(
        "records: {} total, {} flagged | min rel_slack {:.4} | wrote {} and {}",
        stats.n_total,
        stats.n_flagged,
        stats.min_rel_slack,
        config.records_path.display(),
        config.summary_path.display()
    );
    println!("violations (D_bath < B - 1e-9, unflagged): {}", stats.n_violations);

    Ok(if stats.n_violations == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
