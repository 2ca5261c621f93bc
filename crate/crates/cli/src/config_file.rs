//! Flat `key = value` experiment configuration files.
//!
//! Lines are `key = value` with `#` comments (full-line or trailing) and
//! blank lines ignored. Every collision and experiment field is
//! addressable; unknown keys are rejected.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use naqtur_core::harness::ExperimentConfig;
use naqtur_core::{Error, Result};

/// Apply a config file onto `config`. Returns the set of keys that were
/// present, so callers can honor precedence rules (e.g. for `seed`).
pub fn apply_file(config: &mut ExperimentConfig, path: &Path) -> Result<BTreeSet<String>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut seen = BTreeSet::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            path: path.display().to_string(),
            line: lineno + 1,
            message: "expected 'key = value'".into(),
        })?;
        let key = key.trim();
        let value = value.trim();
        apply_kv(config, key, value).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: lineno + 1,
            message: e.to_string(),
        })?;
        seen.insert(key.to_string());
    }
    Ok(seen)
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| Error::Config(format!("{key}: {e}")))
}

pub fn apply_kv(config: &mut ExperimentConfig, key: &str, value: &str) -> Result<()> {
    match key {
        "seed" => config.collision.seed = parse(key, value)?,
        "r_min" => config.collision.r_min = parse(key, value)?,
        "r_max" => config.collision.r_max = parse(key, value)?,
        "phi_min" => config.collision.phi_min = parse(key, value)?,
        "phi_max" => config.collision.phi_max = parse(key, value)?,
        "system_mode" => config.collision.system_mode = value.parse()?,
        "eps_min" => config.collision.eps_min = parse(key, value)?,
        "eps_max" => config.collision.eps_max = parse(key, value)?,
        "k" => config.collision.k = parse(key, value)?,
        "random_frame" => config.collision.random_frame = parse(key, value)?,
        "use_fixed_point_unitary" => {
            config.collision.use_fixed_point_unitary = parse(key, value)?
        }
        "n_samples" => config.n_samples = parse(key, value)?,
        "strategy" => config.strategy = value.parse()?,
        "strat_axis" => config.strat_axis = value.parse()?,
        "n_bins" => config.n_bins = parse(key, value)?,
        "hunt_rounds" => config.hunt_rounds = parse(key, value)?,
        "hunt_keep_fraction" => config.hunt_keep_fraction = parse(key, value)?,
        "quadrature_order" => config.quadrature_order = parse(key, value)?,
        "records_path" => config.records_path = PathBuf::from(value),
        "summary_path" => config.summary_path = PathBuf::from(value),
        other => {
            return Err(Error::Config(format!("unknown config key '{other}'")));
        }
    }
    Ok(())
}
