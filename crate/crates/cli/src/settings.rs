//! Solver configuration: defaults, then a `key = value` file, then flags.

use std::path::Path;
use std::str::FromStr;

use hpmf_core::{HpmfConfig, RankProfile};
use thiserror::Error;

use crate::args::SolverArgs;

#[derive(Debug, Error)]
pub enum SettingsError {
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {value}")]
    BadValue { line: usize, key: String, value: String },
    #[error("invalid configuration: {0}")]
    Invalid(#[from] hpmf_core::hpmf::ConfigError),
}

const ORDER: usize = 3;

fn parse<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, SettingsError> {
    value.trim().parse().map_err(|_| SettingsError::BadValue {
        line,
        key: key.to_string(),
        value: value.to_string(),
    })
}

// one value for every mode, or a comma list with one per mode
fn per_mode(line: usize, key: &str, value: &str) -> Result<Vec<f64>, SettingsError> {
    let items = value
        .split(',')
        .map(|v| parse::<f64>(line, key, v))
        .collect::<Result<Vec<_>, _>>()?;
    match items.len() {
        1 => Ok(vec![items[0]; ORDER]),
        ORDER => Ok(items),
        _ => Err(SettingsError::BadValue {
            line,
            key: key.to_string(),
            value: value.to_string(),
        }),
    }
}

/// Applies the assignments in `text` to `cfg`. Blank lines and `#` comments
/// are ignored.
pub fn apply_config_text(cfg: &mut HpmfConfig, text: &str) -> Result<(), SettingsError> {
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or(SettingsError::Syntax { line })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(SettingsError::Syntax { line });
        }
        match key {
            "alpha" => cfg.alpha = per_mode(line, key, value)?,
            "lambda_u" => cfg.lambda_u = per_mode(line, key, value)?,
            "lambda_v" => cfg.lambda_v = per_mode(line, key, value)?,
            "rho_u" => cfg.rho_u = per_mode(line, key, value)?,
            "rho_v" => cfg.rho_v = per_mode(line, key, value)?,
            "beta_u0" => cfg.beta_u0 = per_mode(line, key, value)?,
            "beta_v0" => cfg.beta_v0 = per_mode(line, key, value)?,
            "omega_u0" => cfg.omega_u0 = per_mode(line, key, value)?,
            "omega_v0" => cfg.omega_v0 = per_mode(line, key, value)?,
            "mu" => cfg.mu = parse(line, key, value)?,
            "penalty_cap" => cfg.penalty_cap = parse(line, key, value)?,
            "max_iters" => cfg.max_iters = parse(line, key, value)?,
            "tol" => cfg.tol = parse(line, key, value)?,
            "delta" => cfg.delta = parse(line, key, value)?,
            "intensity_scale" => cfg.intensity_scale = parse(line, key, value)?,
            "seed" => cfg.seed = parse(line, key, value)?,
            "parallel" => cfg.parallel = parse(line, key, value)?,
            "record_timing" => cfg.record_timing = parse(line, key, value)?,
            "rank_override" => {
                cfg.rank_override = if value == "none" {
                    None
                } else {
                    let ranks = value
                        .split(',')
                        .map(|v| parse::<usize>(line, key, v))
                        .collect::<Result<Vec<_>, _>>()?;
                    Some(RankProfile::new(ranks))
                }
            }
            _ => {
                return Err(SettingsError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
        }
    }
    Ok(())
}

/// Defaults, overridden by the config file, overridden by flags.
pub fn resolve(args: &SolverArgs) -> Result<HpmfConfig, SettingsError> {
    let mut cfg = HpmfConfig::defaults(ORDER);
    if let Some(path) = &args.config {
        let text = read(path)?;
        apply_config_text(&mut cfg, &text)?;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.delta {
        cfg.delta = v;
    }
    if let Some(v) = args.mu {
        cfg.mu = v;
    }
    if let Some(v) = args.max_iters {
        cfg.max_iters = v;
    }
    if let Some(v) = args.tol {
        cfg.tol = v;
    }
    if let Some(v) = &args.rank {
        cfg.rank_override = Some(RankProfile::new(v.clone()));
    }
    if let Some(v) = args.intensity_scale {
        cfg.intensity_scale = v;
    }
    if args.parallel {
        cfg.parallel = true;
    }
    if args.no_timing {
        cfg.record_timing = false;
    }
    cfg.validate(ORDER)?;
    Ok(cfg)
}

fn read(path: &Path) -> Result<String, SettingsError> {
    std::fs::read_to_string(path).map_err(|source| SettingsError::Read {
        path: path.display().to_string(),
        source,
    })
}
