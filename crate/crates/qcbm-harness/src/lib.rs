//! Experiment orchestration for Born machine generalization studies.
//!
//! A JSON config describes a sweep over circuit depths, training
//! fractions, and reweighting temperatures. The runner executes one
//! training cell per (L, ε, β, seed), persists raw records incrementally
//! for resume, and rebuilds a deterministic results.csv with per-group
//! aggregates. Plot emitters turn result directories into plot-ready CSV
//! series and optional SVG renderings.

pub mod cells;
pub mod config;
pub mod error;
pub mod plots;
pub mod runner;
pub mod seeds;
pub mod svg;
pub mod table;

pub use cells::{enumerate_cells, Cell};
pub use config::{BetaMode, DatasetConfig, ExperimentConfig, TrainerSettings};
pub use error::{HarnessError, Result};
pub use runner::{BaselineRecord, CellRecord, CurvePoint, RunOutcome, Runner};
pub use table::{ResultTable, RunRow};
