//! Sweep configuration files.
//!
//! Configurations are TOML documents mirroring [`ExperimentConfig`]; every
//! field except `kind` is optional and falls back to the defaults below.
//! Unknown keys are a hard error so typos cannot silently change an
//! experiment. The resolved configuration is echoed into each results
//! directory and re-running that echo reproduces the outputs exactly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::experiment::{
    ExperimentConfig, ExperimentKind, MlwTemplate, PairSelectionConfig, Topology,
};
use crate::generate::DEFAULT_SW_REWIRE_PROB;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

pub mod defaults {
    pub const N: usize = 1000;
    pub const RUNS: usize = 30;
    pub const MAX_STEPS: u64 = 10_000_000;
    pub const BASE_SEED: u64 = 1;
    pub const RHO: f64 = 0.5;
    pub const M0: usize = 4;
    pub const RHO_TH_FACTOR: f64 = 2.0;

    /// The full local-world-size grid: 3..19 stepping by 1, then 20..100
    /// stepping by 10.
    pub fn m0_grid() -> Vec<usize> {
        (3..20).chain((20..=100).step_by(10)).collect()
    }

    /// 0.1 through 0.9 stepping by 0.1.
    pub fn rho_grid() -> Vec<f64> {
        (1..=9).map(|i| i as f64 / 10.0).collect()
    }

    pub fn n_grid() -> Vec<usize> {
        vec![500, 1500]
    }
}

/// On-disk sweep description; see the crate README for the key reference.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepFile {
    pub kind: Option<ExperimentKind>,
    pub n: Option<usize>,
    pub runs: Option<usize>,
    pub max_steps: Option<u64>,
    pub base_seed: Option<u64>,
    pub rho: Option<f64>,
    pub m0: Option<usize>,
    pub m0_values: Option<Vec<usize>>,
    pub rho_values: Option<Vec<f64>>,
    pub n_values: Option<Vec<usize>>,
    pub topologies: Option<Vec<Topology>>,
    pub regenerate_network_per_run: Option<bool>,
    pub save_series: Option<bool>,
    pub save_networks: Option<bool>,
    pub workers: Option<usize>,
    pub rho_th_factor: Option<f64>,
    pub mlw: Option<MlwTemplate>,
    pub baseline: Option<BaselineSection>,
    pub game: Option<GameSection>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BaselineSection {
    pub sw_rewire_prob: f64,
}

impl Default for BaselineSection {
    fn default() -> Self {
        BaselineSection {
            sw_rewire_prob: DEFAULT_SW_REWIRE_PROB,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GameSection {
    pub pair_selection: PairSelectionConfig,
}

impl SweepFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    /// Fills defaults and validates every expanded sweep point.
    pub fn resolve(self) -> Result<ExperimentConfig, ConfigError> {
        let kind = self
            .kind
            .ok_or_else(|| ConfigError::Invalid("config must set `kind`".into()))?;
        let cfg = ExperimentConfig {
            kind,
            n: self.n.unwrap_or(defaults::N),
            runs: self.runs.unwrap_or(defaults::RUNS),
            max_steps: self.max_steps.unwrap_or(defaults::MAX_STEPS),
            base_seed: self.base_seed.unwrap_or(defaults::BASE_SEED),
            rho: self.rho.unwrap_or(defaults::RHO),
            m0: self.m0.unwrap_or(defaults::M0),
            m0_values: self.m0_values.unwrap_or_else(defaults::m0_grid),
            rho_values: self.rho_values.unwrap_or_else(defaults::rho_grid),
            n_values: self.n_values.unwrap_or_else(defaults::n_grid),
            topologies: self.topologies.unwrap_or_else(|| {
                vec![Topology::Mlw, Topology::Rg, Topology::Sw, Topology::Sf]
            }),
            regenerate_network_per_run: self.regenerate_network_per_run.unwrap_or(true),
            save_series: self.save_series.unwrap_or(true),
            save_networks: self.save_networks.unwrap_or(false),
            workers: self.workers.unwrap_or(0),
            rho_th_factor: self.rho_th_factor.unwrap_or(defaults::RHO_TH_FACTOR),
            mlw: self.mlw.unwrap_or_default(),
            sw_rewire_prob: self.baseline.unwrap_or_default().sw_rewire_prob,
            pair_selection: self.game.unwrap_or_default().pair_selection,
        };
        validate(&cfg)?;
        Ok(cfg)
    }
}

fn validate(cfg: &ExperimentConfig) -> Result<(), ConfigError> {
    if cfg.runs == 0 {
        return Err(ConfigError::Invalid("runs must be >= 1".into()));
    }
    if cfg.max_steps == 0 {
        return Err(ConfigError::Invalid("max_steps must be >= 1".into()));
    }
    let mut rho_values = cfg.rho_values.clone();
    rho_values.sort_by(f64::total_cmp);
    rho_values.dedup();
    if rho_values.len() != cfg.rho_values.len()
        || rho_values
            .iter()
            .zip(&cfg.rho_values)
            .any(|(a, b)| a != b)
    {
        return Err(ConfigError::Invalid(
            "rho_values must be strictly increasing".into(),
        ));
    }
    // every sweep point must satisfy the generator preconditions
    cfg.expand_points()
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(())
}

/// Serializes a resolved configuration back into a loadable file.
pub fn echo_config(cfg: &ExperimentConfig) -> String {
    let file = SweepFile {
        kind: Some(cfg.kind),
        n: Some(cfg.n),
        runs: Some(cfg.runs),
        max_steps: Some(cfg.max_steps),
        base_seed: Some(cfg.base_seed),
        rho: Some(cfg.rho),
        m0: Some(cfg.m0),
        m0_values: Some(cfg.m0_values.clone()),
        rho_values: Some(cfg.rho_values.clone()),
        n_values: Some(cfg.n_values.clone()),
        topologies: Some(cfg.topologies.clone()),
        regenerate_network_per_run: Some(cfg.regenerate_network_per_run),
        save_series: Some(cfg.save_series),
        save_networks: Some(cfg.save_networks),
        workers: Some(cfg.workers),
        rho_th_factor: Some(cfg.rho_th_factor),
        mlw: Some(cfg.mlw),
        baseline: Some(BaselineSection {
            sw_rewire_prob: cfg.sw_rewire_prob,
        }),
        game: Some(GameSection {
            pair_selection: cfg.pair_selection,
        }),
    };
    toml::to_string_pretty(&file).expect("config serializes")
}
