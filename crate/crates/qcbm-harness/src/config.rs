//! Versioned JSON experiment configuration.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

use qcbm::trainer::{ProbabilityMode, TrainerConfig};
use qcbm::{cardinality_space, evens_space, param_count, SolutionSpace, Topology};

use crate::error::{HarnessError, Result};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetConfig {
    Cardinality { n_bits: usize, k: usize },
    Evens { n_bits: usize },
}

impl DatasetConfig {
    pub fn n_bits(&self) -> usize {
        match *self {
            DatasetConfig::Cardinality { n_bits, .. } => n_bits,
            DatasetConfig::Evens { n_bits } => n_bits,
        }
    }

    pub fn space(&self) -> qcbm::Result<SolutionSpace> {
        match *self {
            DatasetConfig::Cardinality { n_bits, k } => cardinality_space(n_bits, k),
            DatasetConfig::Evens { n_bits } => evens_space(n_bits),
        }
    }
}

/// Softmax reweighting temperature relative to the training-cost spread T.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaMode {
    /// Keep the uniform 1/D weights.
    #[default]
    None,
    /// β = 1/T.
    InverseT,
    /// β = 2/T.
    DoubleInverseT,
}

impl BetaMode {
    pub fn beta(self, temperature: f64) -> f64 {
        match self {
            BetaMode::None => 0.0,
            BetaMode::InverseT => 1.0 / temperature,
            BetaMode::DoubleInverseT => 2.0 / temperature,
        }
    }

    /// Needs a temperature estimate, hence at least two training costs.
    pub fn requires_temperature(self) -> bool {
        self != BetaMode::None
    }
}

impl fmt::Display for BetaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BetaMode::None => "none",
            BetaMode::InverseT => "inverse_t",
            BetaMode::DoubleInverseT => "double_inverse_t",
        })
    }
}

/// Trainer knobs shared by every cell; the per-cell seed and the random
/// initial mean are derived at run time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainerSettings {
    pub max_iterations: u64,
    pub population_size: Option<usize>,
    pub initial_step: f64,
    pub convergence_threshold: Option<f64>,
    pub log_every: u64,
    pub nll_floor: f64,
    pub probability_mode: ProbabilityMode,
}

impl Default for TrainerSettings {
    fn default() -> Self {
        let base = TrainerConfig::default();
        Self {
            max_iterations: base.max_iterations,
            population_size: base.population_size,
            initial_step: base.initial_step,
            convergence_threshold: base.convergence_threshold,
            log_every: base.log_every,
            nll_floor: base.nll_floor,
            probability_mode: base.probability_mode,
        }
    }
}

impl TrainerSettings {
    pub fn to_config(&self, seed: u64) -> TrainerConfig {
        TrainerConfig {
            max_iterations: self.max_iterations,
            population_size: self.population_size,
            initial_step: self.initial_step,
            seed,
            convergence_threshold: self.convergence_threshold,
            log_every: self.log_every,
            nll_floor: self.nll_floor,
            initial_mean: None,
            probability_mode: self.probability_mode,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub dataset: DatasetConfig,
    #[serde(default = "default_topology")]
    pub topology: Topology,
    #[serde(default = "default_layers")]
    pub layers: Vec<usize>,
    pub epsilons: Vec<f64>,
    #[serde(default = "default_beta_modes")]
    pub beta_modes: Vec<BetaMode>,
    #[serde(default = "default_seeds_per_cell")]
    pub seeds_per_cell: usize,
    #[serde(default)]
    pub trainer: TrainerSettings,
    #[serde(default = "default_query_count")]
    pub query_count: usize,
    /// Evaluate generalization metrics during training at this iteration
    /// cadence (absent = final evaluation only). Roughly triples cell
    /// runtime when set; 250 is the documented choice for learning curves.
    #[serde(default)]
    pub metrics_every: Option<u64>,
    #[serde(default = "default_baseline_runs")]
    pub baseline_runs: usize,
    /// Tail threshold t for P_{c<t}; absent disables the tail column.
    #[serde(default)]
    pub cost_threshold: Option<i64>,
    pub master_seed: u64,
    /// Placed under the output root (--out, QCBM_OUTPUT_ROOT, or cwd).
    pub output_dir: String,
}

fn default_topology() -> Topology {
    Topology::Line
}

fn default_layers() -> Vec<usize> {
    vec![2]
}

fn default_beta_modes() -> Vec<BetaMode> {
    vec![BetaMode::None]
}

fn default_seeds_per_cell() -> usize {
    5
}

fn default_query_count() -> usize {
    10_000
}

fn default_baseline_runs() -> usize {
    5
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            HarnessError::Config(format!("cannot read {}: {e}", path.display()))
        })?;
        let config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    /// Structural validation: everything checkable without running cells.
    /// Per-cell conditions that depend on drawn data (for example a
    /// temperature estimate over a single-sample training set) surface as
    /// recorded cell failures instead.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(HarnessError::Config(msg));
        if self.version != CONFIG_VERSION {
            return fail(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                self.version
            ));
        }
        let space = self.dataset.space().map_err(|e| {
            HarnessError::Config(format!("dataset: {e}"))
        })?;
        if self.layers.is_empty() {
            return fail("layers must be non-empty".into());
        }
        for &l in &self.layers {
            param_count(self.dataset.n_bits(), l, self.topology).map_err(|e| {
                HarnessError::Config(format!("layers entry {l}: {e}"))
            })?;
        }
        if self.epsilons.is_empty() {
            return fail("epsilons must be non-empty".into());
        }
        for &eps in &self.epsilons {
            qcbm::sample_training_set(&space, eps, 0).map_err(|e| {
                HarnessError::Config(format!("epsilon {eps}: {e}"))
            })?;
        }
        if self.beta_modes.is_empty() {
            return fail("beta_modes must be non-empty".into());
        }
        if self.seeds_per_cell == 0 {
            return fail("seeds_per_cell must be at least 1".into());
        }
        if self.query_count == 0 {
            return fail("query_count must be at least 1".into());
        }
        if self.baseline_runs == 0 {
            return fail("baseline_runs must be at least 1".into());
        }
        match self.metrics_every {
            Some(0) => return fail("metrics_every must be at least 1 when set".into()),
            Some(every) if every % self.trainer.log_every != 0 => {
                return fail(format!(
                    "metrics_every ({every}) must be a multiple of trainer.log_every ({}) \
                     so evaluation points land on logged iterations",
                    self.trainer.log_every
                ));
            }
            _ => {}
        }
        if self.output_dir.is_empty() {
            return fail("output_dir must be non-empty".into());
        }
        if Path::new(&self.output_dir).is_absolute() {
            return fail("output_dir must be relative to the output root".into());
        }
        // trainer numeric ranges are owned by the trainer crate
        self.trainer
            .to_config(0)
            .validate_for(param_count(
                self.dataset.n_bits(),
                self.layers[0],
                self.topology,
            )?)
            .map_err(|e| HarnessError::Config(format!("trainer: {e}")))?;
        Ok(())
    }
}
