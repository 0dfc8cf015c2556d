//! Sweep cells: one training run per (layers, ε, β mode, seed index).

use crate::config::{BetaMode, ExperimentConfig};

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    /// Position in enumeration order; results.csv rows follow it.
    pub index: usize,
    pub layers: usize,
    pub epsilon: f64,
    pub beta_mode: BetaMode,
    pub seed_index: usize,
}

impl Cell {
    /// Stable id; doubles as the raw-result file stem and the seed
    /// derivation key, so its format must never change silently.
    pub fn id(&self) -> String {
        format!("{}_s{}", self.group(), self.seed_index)
    }

    /// Aggregation group: the cell id minus the seed index.
    pub fn group(&self) -> String {
        format!("L{}_eps{}_{}", self.layers, self.epsilon, self.beta_mode)
    }
}

pub fn enumerate_cells(config: &ExperimentConfig) -> Vec<Cell> {
    let mut cells = Vec::new();
    for &layers in &config.layers {
        for &epsilon in &config.epsilons {
            for &beta_mode in &config.beta_modes {
                for seed_index in 0..config.seeds_per_cell {
                    cells.push(Cell {
                        index: cells.len(),
                        layers,
                        epsilon,
                        beta_mode,
                        seed_index,
                    });
                }
            }
        }
    }
    cells
}
