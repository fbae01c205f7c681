//! Sweep configuration: defaults, CLI overrides, and the TOML config file.
//!
//! Precedence is defaults < command-line flags < config file, with the
//! `DCC_BENCH_OUT` environment variable overriding the output directory
//! last.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use serde_json::json;

use dcc_dvhop::moga::GaConfig;
use dcc_dvhop::net::Topology;
use dcc_dvhop::objectives::HopLossKind;

/// Environment variable that overrides the output directory.
pub const OUTPUT_DIR_ENV: &str = "DCC_BENCH_OUT";

/// GA settings carried by the sweep configuration; seed and bounds are
/// filled in per run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaSettings {
    pub population_size: usize,
    pub max_iterations: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    pub eta_c: f64,
    pub eta_m: f64,
}

impl Default for GaSettings {
    fn default() -> Self {
        let d = GaConfig::default();
        Self {
            population_size: d.population_size,
            max_iterations: d.max_iterations,
            crossover_prob: d.crossover_prob,
            mutation_prob: d.mutation_prob,
            eta_c: d.eta_c,
            eta_m: d.eta_m,
        }
    }
}

/// Full sweep definition.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub topologies: Vec<Topology>,
    pub anchor_counts: Vec<usize>,
    pub radii: Vec<f64>,
    pub repeats: usize,
    pub total_nodes: usize,
    pub kinds: Vec<HopLossKind>,
    pub base_seed: u64,
    pub output_dir: PathBuf,
    pub ga: GaSettings,
    /// Worker threads for the sweep pool; `None` uses the rayon default.
    pub jobs: Option<usize>,
    /// When set, each run writes its per-generation log CSV here.
    pub ga_log_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            topologies: Topology::ALL.to_vec(),
            anchor_counts: vec![5, 10, 15, 20, 25, 30],
            radii: vec![25.0, 30.0, 35.0, 40.0],
            repeats: 50,
            total_nodes: 100,
            kinds: vec![HopLossKind::Base, HopLossKind::Dcc],
            base_seed: 42,
            output_dir: PathBuf::from("out"),
            ga: GaSettings::default(),
            jobs: None,
            ga_log_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.topologies.is_empty()
            || self.anchor_counts.is_empty()
            || self.radii.is_empty()
            || self.kinds.is_empty()
        {
            bail!("topologies, anchor_counts, radii and kinds must be non-empty");
        }
        if self.repeats < 1 {
            bail!("repeats must be >= 1");
        }
        let max_anchors = *self.anchor_counts.iter().max().unwrap();
        if self.total_nodes < max_anchors + 1 {
            bail!(
                "total_nodes = {} cannot host {} anchors plus an unknown",
                self.total_nodes,
                max_anchors
            );
        }
        if self.radii.iter().any(|r| !(*r > 0.0)) {
            bail!("radii must be positive");
        }
        // Surface GA parameter problems before the sweep starts.
        self.ga_config(0, 100.0)
            .validate()
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        Ok(())
    }

    /// Number of grid cells (excluding repeats and kinds).
    pub fn cell_count(&self) -> usize {
        self.topologies.len() * self.anchor_counts.len() * self.radii.len()
    }

    /// Concrete GA config for one run.
    pub fn ga_config(&self, seed: u64, region: f64) -> GaConfig {
        GaConfig {
            population_size: self.ga.population_size,
            max_iterations: self.ga.max_iterations,
            crossover_prob: self.ga.crossover_prob,
            mutation_prob: self.ga.mutation_prob,
            eta_c: self.ga.eta_c,
            eta_m: self.ga.eta_m,
            bounds: (0.0, region),
            seed,
        }
    }

    /// Applies the config file on top (file wins over flags and defaults).
    pub fn apply_file(&mut self, file: &ConfigFile) -> Result<()> {
        if let Some(v) = &file.topologies {
            self.topologies = parse_list::<Topology>(v, "topology")?;
        }
        if let Some(v) = &file.anchor_counts {
            self.anchor_counts = v.clone();
        }
        if let Some(v) = &file.radii {
            self.radii = v.clone();
        }
        if let Some(v) = file.repeats {
            self.repeats = v;
        }
        if let Some(v) = file.total_nodes {
            self.total_nodes = v;
        }
        if let Some(v) = &file.kinds {
            self.kinds = parse_list::<HopLossKind>(v, "hop loss kind")?;
        }
        if let Some(v) = file.base_seed {
            self.base_seed = v;
        }
        if let Some(v) = &file.output_dir {
            self.output_dir = PathBuf::from(v);
        }
        if let Some(ga) = &file.ga {
            if let Some(v) = ga.population_size {
                self.ga.population_size = v;
            }
            if let Some(v) = ga.max_iterations {
                self.ga.max_iterations = v;
            }
            if let Some(v) = ga.crossover_prob {
                self.ga.crossover_prob = v;
            }
            if let Some(v) = ga.mutation_prob {
                self.ga.mutation_prob = v;
            }
            if let Some(v) = ga.eta_c {
                self.ga.eta_c = v;
            }
            if let Some(v) = ga.eta_m {
                self.ga.eta_m = v;
            }
        }
        Ok(())
    }

    /// Applies the output-directory environment override.
    pub fn apply_env(&mut self) {
        if let Ok(dir) = std::env::var(OUTPUT_DIR_ENV) {
            if !dir.is_empty() {
                self.output_dir = PathBuf::from(dir);
            }
        }
    }

    /// The fully resolved configuration as written to `manifest.json`.
    pub fn manifest_json(&self) -> serde_json::Value {
        json!({
            "topologies": self.topologies.iter().map(|t| t.token()).collect::<Vec<_>>(),
            "anchor_counts": self.anchor_counts,
            "radii": self.radii,
            "repeats": self.repeats,
            "total_nodes": self.total_nodes,
            "kinds": self.kinds.iter().map(|k| k.token()).collect::<Vec<_>>(),
            "base_seed": self.base_seed,
            "output_dir": self.output_dir.display().to_string(),
            "ga": {
                "population_size": self.ga.population_size,
                "max_iterations": self.ga.max_iterations,
                "crossover_prob": self.ga.crossover_prob,
                "mutation_prob": self.ga.mutation_prob,
                "eta_c": self.ga.eta_c,
                "eta_m": self.ga.eta_m,
            },
        })
    }
}

fn parse_list<T: FromStr>(values: &[String], what: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    values
        .iter()
        .map(|s| s.parse::<T>().map_err(|e| anyhow::anyhow!("bad {what} '{s}': {e}")))
        .collect()
}

/// On-disk config file (TOML). Every field is optional; present fields
/// override the resolved configuration.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub topologies: Option<Vec<String>>,
    pub anchor_counts: Option<Vec<usize>>,
    pub radii: Option<Vec<f64>>,
    pub repeats: Option<usize>,
    pub total_nodes: Option<usize>,
    pub kinds: Option<Vec<String>>,
    pub base_seed: Option<u64>,
    pub output_dir: Option<String>,
    pub ga: Option<GaFileSection>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaFileSection {
    pub population_size: Option<usize>,
    pub max_iterations: Option<usize>,
    pub crossover_prob: Option<f64>,
    pub mutation_prob: Option<f64>,
    pub eta_c: Option<f64>,
    pub eta_m: Option<f64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}
