//! JSON run configurations. Every command's effective settings serialize
//! to one of these and are echoed into its output.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lab::ExperimentConfig;
use crate::solver::SolverConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum RunConfig {
    Recover(RecoverConfig),
    Forecast(ForecastConfig),
    Diagnose(DiagnoseConfig),
    Simulate(ExperimentConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoverConfig {
    pub input: Option<String>,
    /// Range syntax, e.g. `"1..12"` or `"(0..2 x 0..2)"`.
    pub missing: String,
    /// Band as a fraction of π; for grids, the row band.
    pub omega: f64,
    /// Column band for grids; defaults to `omega`.
    #[serde(default)]
    pub omega_cols: Option<f64>,
    #[serde(default)]
    pub solver: SolverConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastConfig {
    /// Past samples; when absent a seeded synthetic past is generated.
    pub input: Option<String>,
    pub seed: u64,
    /// Length `q` of the past window `{-q..0}`.
    pub past: i64,
    pub omega: f64,
    pub horizon: usize,
    pub gap: usize,
    pub n: i64,
    /// `"zero"`, `"truth"` (synthetic past only) or a CSV path holding
    /// samples on `gap+1..=n`.
    pub dummy: String,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnoseConfig {
    pub missing: Option<String>,
    pub omega: f64,
    /// Sweep `M = {1..m}` over these sizes instead of a single mask.
    pub gap_sizes: Option<String>,
}

pub fn parse_run_config(text: &str) -> Result<RunConfig> {
    let config: RunConfig = serde_json::from_str(text)?;
    if let RunConfig::Simulate(e) = &config {
        e.validate().map_err(|err| Error::parse(err.to_string()))?;
    }
    Ok(config)
}
