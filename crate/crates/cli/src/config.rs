//! Settings resolved from flags, an optional TOML file and defaults.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;

/// Environment variable naming a TOML settings file.
pub const CONFIG_ENV: &str = "FREEINEQ_CONFIG";

/// Keys accepted in the settings file; all optional.
#[derive(Debug, Default, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub degree: Option<usize>,
    pub cells: Option<usize>,
    pub jobs: Option<usize>,
    pub tolerance: Option<f64>,
    pub diagnostic: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn from_env() -> Result<Self> {
        match std::env::var_os(CONFIG_ENV) {
            Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
            _ => Ok(Self::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub seed: u64,
    pub samples: usize,
    pub degree: usize,
    pub cells: usize,
    pub jobs: Option<usize>,
    pub tolerance: f64,
    pub diagnostic: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Self { seed: 1, samples: 1000, degree: 32, cells: 2000, jobs: None, tolerance: 1e-9, diagnostic: false }
    }
}

impl Settings {
    /// Flags win over the file, the file over the defaults.
    pub fn resolve(flags: &FileConfig, file: &FileConfig) -> Result<Self> {
        let d = Self::default();
        let s = Self {
            seed: flags.seed.or(file.seed).unwrap_or(d.seed),
            samples: flags.samples.or(file.samples).unwrap_or(d.samples),
            degree: flags.degree.or(file.degree).unwrap_or(d.degree),
            cells: flags.cells.or(file.cells).unwrap_or(d.cells),
            jobs: flags.jobs.or(file.jobs),
            tolerance: flags.tolerance.or(file.tolerance).unwrap_or(d.tolerance),
            diagnostic: flags.diagnostic.or(file.diagnostic).unwrap_or(d.diagnostic),
        };
        anyhow::ensure!(s.degree >= 1, "degree must be at least 1");
        anyhow::ensure!(s.cells >= 2, "cells must be at least 2");
        anyhow::ensure!(s.tolerance >= 0.0 && s.tolerance.is_finite(), "tolerance must be a nonnegative number");
        anyhow::ensure!(s.jobs != Some(0), "jobs must be positive");
        Ok(s)
    }
}
