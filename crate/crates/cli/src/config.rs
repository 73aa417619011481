//! Quadrature settings from an optional `key = value` file plus flag overrides.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use hw_staffing::QuadratureConfig;
use serde::Deserialize;

use crate::CliError;

pub const CONFIG_ENV: &str = "HW_STAFFING_CONFIG";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    max_refinements: Option<u32>,
    truncation_log_cutoff: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct QuadratureFlags {
    /// Relative tolerance of the adaptive quadrature.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub rel_tol: Option<f64>,
    /// Absolute tolerance of the adaptive quadrature.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub abs_tol: Option<f64>,
    /// Maximum number of refinement rounds.
    #[arg(long, global = true)]
    pub max_refinements: Option<u32>,
    /// Integrand is truncated where its log falls this far below the peak.
    #[arg(
        long = "truncation-cutoff",
        global = true,
        allow_negative_numbers = true
    )]
    pub truncation_log_cutoff: Option<f64>,
}

fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| {
        CliError::Config(format!("cannot read config file {}: {e}", path.display()))
    })?;
    toml::from_str(&text)
        .map_err(|e| CliError::Config(format!("invalid config file {}: {e}", path.display())))
}

/// Defaults, then the file (`--config`, else `$HW_STAFFING_CONFIG`), then flags.
pub fn resolve(path: Option<&Path>, flags: &QuadratureFlags) -> Result<QuadratureConfig, CliError> {
    let env_path = std::env::var_os(CONFIG_ENV)
        .filter(|p| !p.is_empty())
        .map(PathBuf::from);
    let file = match path.map(Path::to_path_buf).or(env_path) {
        Some(p) => read_file(&p)?,
        None => FileConfig::default(),
    };
    let mut cfg = QuadratureConfig::default();
    let pick =
        |flag: Option<f64>, file: Option<f64>, default: f64| flag.or(file).unwrap_or(default);
    cfg.rel_tol = pick(flags.rel_tol, file.rel_tol, cfg.rel_tol);
    cfg.abs_tol = pick(flags.abs_tol, file.abs_tol, cfg.abs_tol);
    cfg.truncation_log_cutoff = pick(
        flags.truncation_log_cutoff,
        file.truncation_log_cutoff,
        cfg.truncation_log_cutoff,
    );
    cfg.max_refinements = flags
        .max_refinements
        .or(file.max_refinements)
        .unwrap_or(cfg.max_refinements);
    cfg.validate()?;
    Ok(cfg)
}
