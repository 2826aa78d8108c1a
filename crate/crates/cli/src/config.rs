//! Run configuration: JSON file named by `GCL_CONFIG`, overridden by flags.

use anyhow::{bail, Context, Result};
use gcl_core::config::{install, Tolerances};
use serde::Deserialize;
use std::path::PathBuf;

pub const CONFIG_ENV: &str = "GCL_CONFIG";

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub tol_psd: f64,
    pub tol_rank: f64,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let t = Tolerances::default();
        Self {
            tol_psd: t.psd,
            tol_rank: t.rank,
            seed: 0,
            output_path: None,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading run config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing run config {}", path.display()))
    }

    pub fn load(overrides: &Overrides) -> Result<Self> {
        let mut config = match std::env::var_os(CONFIG_ENV) {
            Some(path) if !path.is_empty() => Self::from_file(path.as_ref())?,
            _ => Self::default(),
        };
        if let Some(tol) = overrides.tol {
            config.tol_psd = tol;
        }
        if let Some(seed) = overrides.seed {
            config.seed = seed;
        }
        if let Some(out) = &overrides.out {
            config.output_path = Some(out.clone());
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("tol_psd", self.tol_psd), ("tol_rank", self.tol_rank)] {
            if !(value > 0.0 && value.is_finite()) {
                bail!("{name} must be positive, got {value}");
            }
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            psd: self.tol_psd,
            rank: self.tol_rank,
            ..Tolerances::default()
        }
    }

    /// Makes the tolerances visible to the library. Only the first call in a
    /// process takes effect.
    pub fn install(&self) -> Result<()> {
        let tolerances = self.tolerances();
        tolerances
            .validate()
            .map_err(|e| anyhow::anyhow!("invalid tolerances: {e}"))?;
        let _ = install(tolerances);
        Ok(())
    }
}
