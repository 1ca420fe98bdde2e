//! Run configuration: a JSON document of construction parameters plus a seed,
//! overridden by command-line flags, and embedded in every output.

use std::path::Path;
use std::str::FromStr;

use clap::Args;
use serde::{Deserialize, Serialize};
use steklov_core::construction::ConstructionParams;

use crate::CliError;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub params: ConstructionParams,
    pub seed: u64,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// `auto` (certify whatever the construction gives) or a number in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeltaArg {
    Auto,
    Value(f64),
}

impl DeltaArg {
    pub fn value(self) -> Option<f64> {
        match self {
            DeltaArg::Auto => None,
            DeltaArg::Value(d) => Some(d),
        }
    }
}

impl FromStr for DeltaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(DeltaArg::Auto);
        }
        let d: f64 = s.parse().map_err(|_| format!("expected `auto` or a number, got `{s}`"))?;
        if d > 0.0 && d < 1.0 {
            Ok(DeltaArg::Value(d))
        } else {
            Err(format!("delta = {d} outside (0, 1)"))
        }
    }
}

/// Parameter overrides shared by every subcommand.
#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct Overrides {
    /// JSON config file (`{"params": {...}, "seed": 0}`).
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub rho: Option<f64>,
    #[arg(long, global = true)]
    pub delta1: Option<f64>,
    /// Correction constant `M` of the approximant `A_m`.
    #[arg(long, global = true)]
    pub m_correction: Option<f64>,
    /// Boundary grid size (default `max(8192, 64n)`).
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory; without it the primary output goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
}

impl Overrides {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let p = &mut cfg.params;
        if let Some(v) = self.alpha {
            p.alpha = v;
        }
        if let Some(v) = self.rho {
            p.rho = v;
        }
        if let Some(v) = self.delta1 {
            p.delta1 = v;
        }
        if let Some(v) = self.m_correction {
            p.m_correction = v;
        }
        if self.grid.is_some() {
            p.grid = self.grid;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }
}
