//! Experiment execution: cell pipelines, incremental persistence, resume.
//!
//! Each cell writes one JSON document under cells/ via a temp-file rename,
//! so a killed run leaves either a complete record or nothing. results.csv
//! is rebuilt from those records in cell-enumeration order on every run,
//! which makes resumed and fresh runs byte-identical.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use qcbm::metrics::MetricsReport;
use qcbm::trainer::HistoryRecord;
use qcbm::{
    build_circuit, evaluate, random_baseline, reweight_softmax, sample_training_set,
    separation_cost, temperature_from_costs, Bitstring, SolutionSpace, TailDenominator,
    TrainingSet,
};

use crate::cells::{enumerate_cells, Cell};
use crate::config::{BetaMode, ExperimentConfig};
use crate::error::{HarnessError, Result};
use crate::seeds::{derive_seed, splitmix64};
use crate::table::{ResultTable, RunRow};

pub const RECORD_VERSION: u32 = 1;

/// One generalization evaluation taken mid-training.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub iteration: u64,
    pub best_nll: f64,
    pub kl_train: Option<f64>,
    pub kl_target: Option<f64>,
    pub f: Option<f64>,
    pub r_norm: f64,
    pub c_norm: f64,
    pub p: f64,
}

/// Raw per-cell result, the unit of resume.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub version: u32,
    pub cell: String,
    pub group: String,
    pub layers: usize,
    pub epsilon: f64,
    pub beta_mode: BetaMode,
    pub seed_index: usize,
    pub dataset_seed: u64,
    pub trainer_seed: u64,
    pub query_seed: u64,
    /// Resolved softmax β (0 for uniform weights).
    pub beta: f64,
    pub report: MetricsReport,
    pub kl_train: Option<f64>,
    pub kl_target: Option<f64>,
    pub evaluations: usize,
    pub warnings: Vec<String>,
    pub curve: Vec<CurvePoint>,
    /// Query count per cost value over the full batch, ascending by cost.
    pub cost_counts: Vec<(i64, usize)>,
}

/// Raw per-ε baseline result: `runs` untrained uniform batches.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineRecord {
    pub version: u32,
    pub group: String,
    pub epsilon: f64,
    pub dataset_seed: u64,
    pub query_seed: u64,
    pub reports: Vec<MetricsReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct Manifest {
    version: u32,
    mode: String,
    config: ExperimentConfig,
}

#[derive(Clone, Debug, Default)]
pub struct RunOutcome {
    pub completed: usize,
    pub reused: usize,
    pub failures: Vec<(String, String)>,
    pub results_csv: PathBuf,
}

pub struct Runner {
    config: ExperimentConfig,
    out_dir: PathBuf,
    parallelism: usize,
}

impl Runner {
    pub fn new(config: ExperimentConfig, output_root: &Path, parallelism: usize) -> Self {
        let out_dir = output_root.join(&config.output_dir);
        Runner {
            config,
            out_dir,
            parallelism: parallelism.max(1),
        }
    }

    pub fn out_dir(&self) -> &Path {
        &self.out_dir
    }

    /// Train-and-evaluate every cell of the sweep, reusing completed
    /// cells from a previous interrupted run.
    pub fn run_experiment(&self) -> Result<RunOutcome> {
        self.prepare("experiment")?;
        let cells = enumerate_cells(&self.config);
        let space = self.config.dataset.space()?;

        let pending: Vec<&Cell> = cells
            .iter()
            .filter(|c| !self.cell_path(&c.id()).exists())
            .collect();
        let reused = cells.len() - pending.len();

        let failures = Mutex::new(Vec::new());
        let next = AtomicUsize::new(0);
        std::thread::scope(|scope| {
            for _ in 0..self.parallelism.min(pending.len().max(1)) {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(cell) = pending.get(i) else { break };
                    match self.run_cell(cell, &space) {
                        Ok(record) => {
                            if let Err(e) = self.persist_cell(cell, &record) {
                                failures
                                    .lock()
                                    .unwrap()
                                    .push((cell.id(), format!("persist: {e}")));
                            }
                        }
                        Err(e) => {
                            let _ = self.persist_failure(&cell.id(), &e.to_string());
                            failures.lock().unwrap().push((cell.id(), e.to_string()));
                        }
                    }
                });
            }
        });
        let failures = failures.into_inner().unwrap();

        let mut table = ResultTable::default();
        for cell in &cells {
            let path = self.cell_path(&cell.id());
            if !path.exists() {
                continue;
            }
            let record: CellRecord = read_json(&path)?;
            table.rows.push(RunRow {
                group: record.group,
                cell: record.cell,
                layers: Some(record.layers),
                beta_mode: record.beta_mode,
                seed_index: record.seed_index,
                report: record.report,
                kl_train: record.kl_train,
                kl_target: record.kl_target,
            });
        }
        let results_csv = self.out_dir.join("results.csv");
        std::fs::write(&results_csv, table.to_csv())?;
        Ok(RunOutcome {
            completed: pending.len() - failures.len(),
            reused,
            failures,
            results_csv,
        })
    }

    /// Untrained uniform-sampling baseline, one group per ε.
    pub fn run_baseline(&self) -> Result<RunOutcome> {
        self.prepare("baseline")?;
        let space = self.config.dataset.space()?;
        let mut failures = Vec::new();
        let mut reused = 0;
        let mut completed = 0;
        let mut table = ResultTable::default();
        for &epsilon in &self.config.epsilons {
            let group = format!("eps{epsilon}");
            let path = self.cell_path(&group);
            let record = if path.exists() {
                reused += 1;
                read_json(&path)?
            } else {
                match self.run_baseline_group(&group, epsilon, &space) {
                    Ok(record) => {
                        self.persist_baseline(&group, &record)?;
                        completed += 1;
                        record
                    }
                    Err(e) => {
                        let _ = self.persist_failure(&group, &e.to_string());
                        failures.push((group.clone(), e.to_string()));
                        continue;
                    }
                }
            };
            for (run, report) in record.reports.iter().enumerate() {
                table.rows.push(RunRow {
                    group: group.clone(),
                    cell: format!("{group}_run{run}"),
                    layers: None,
                    beta_mode: BetaMode::None,
                    seed_index: run,
                    report: report.clone(),
                    kl_train: None,
                    kl_target: None,
                });
            }
        }
        let results_csv = self.out_dir.join("results.csv");
        std::fs::write(&results_csv, table.to_csv())?;
        Ok(RunOutcome {
            completed,
            reused,
            failures,
            results_csv,
        })
    }

    fn run_baseline_group(
        &self,
        group: &str,
        epsilon: f64,
        space: &SolutionSpace,
    ) -> Result<BaselineRecord> {
        let dataset_seed = derive_seed(self.config.master_seed, group, "dataset");
        let query_seed = derive_seed(self.config.master_seed, group, "queries");
        let ts = sample_training_set(space, epsilon, dataset_seed)?;
        let mut rng = ChaCha8Rng::seed_from_u64(query_seed);
        let summary = random_baseline(
            space,
            &ts,
            self.config.query_count,
            self.config.baseline_runs,
            &mut rng,
            separation_cost,
            self.config.cost_threshold,
        )?;
        Ok(BaselineRecord {
            version: RECORD_VERSION,
            group: group.to_string(),
            epsilon,
            dataset_seed,
            query_seed,
            reports: summary.reports,
        })
    }

    fn run_cell(&self, cell: &Cell, space: &SolutionSpace) -> Result<CellRecord> {
        let cell_id = cell.id();
        let dataset_seed = derive_seed(self.config.master_seed, &cell_id, "dataset");
        let trainer_seed = derive_seed(self.config.master_seed, &cell_id, "trainer");
        let query_seed = derive_seed(self.config.master_seed, &cell_id, "queries");

        let circuit = build_circuit(
            self.config.dataset.n_bits(),
            cell.layers,
            self.config.topology,
        )?;
        let mut ts = sample_training_set(space, cell.epsilon, dataset_seed)?;
        let mut beta = 0.0;
        if cell.beta_mode.requires_temperature() {
            let temperature = temperature_from_costs(&ts, separation_cost)?;
            beta = cell.beta_mode.beta(temperature);
            ts = reweight_softmax(&ts, separation_cost, beta)?;
        }

        let target = space.target_distribution();
        let trainer_config = self.config.trainer.to_config(trainer_seed);
        let max_iterations = trainer_config.max_iterations;
        let mut curve = Vec::new();
        let observe = |record: &HistoryRecord, params: &[f64]| {
            let Some(every) = self.config.metrics_every else { return };
            let last = record.iteration == max_iterations;
            if record.iteration % every != 0 && !last {
                return;
            }
            if let Ok(point) = self.curve_point(&circuit, params, &ts, space, query_seed, record) {
                curve.push(point);
            }
        };
        let (best_params, history) =
            qcbm::train_with_observer(&circuit, &ts, &trainer_config, Some(&target), observe)?;

        let state = circuit.execute(&best_params)?;
        let mut rng = ChaCha8Rng::seed_from_u64(query_seed);
        let queries = state.sample(self.config.query_count, &mut rng);
        let report = evaluate(
            &queries,
            &ts,
            space,
            separation_cost,
            self.config.cost_threshold,
            TailDenominator::AllValid,
        )?;
        let last = history.records.last();

        self.persist_history(&cell_id, &circuit, &best_params, &history)?;
        Ok(CellRecord {
            version: RECORD_VERSION,
            cell: cell_id,
            group: cell.group(),
            layers: cell.layers,
            epsilon: cell.epsilon,
            beta_mode: cell.beta_mode,
            seed_index: cell.seed_index,
            dataset_seed,
            trainer_seed,
            query_seed,
            beta,
            report,
            kl_train: last.and_then(|r| r.kl_train),
            kl_target: last.and_then(|r| r.kl_target),
            evaluations: history.evaluations,
            warnings: history.warnings,
            curve,
            cost_counts: cost_histogram(&queries),
        })
    }

    /// One mid-training generalization snapshot. The query stream is its
    /// own derivation per iteration so inserting or removing evaluation
    /// points never shifts the final-batch stream.
    fn curve_point(
        &self,
        circuit: &qcbm::CircuitSpec,
        params: &[f64],
        ts: &TrainingSet,
        space: &SolutionSpace,
        query_seed: u64,
        record: &HistoryRecord,
    ) -> Result<CurvePoint> {
        let state = circuit.execute(params)?;
        let mut rng =
            ChaCha8Rng::seed_from_u64(splitmix64(query_seed ^ (record.iteration + 1)));
        let queries = state.sample(self.config.query_count, &mut rng);
        let report = evaluate(
            &queries,
            ts,
            space,
            separation_cost,
            self.config.cost_threshold,
            TailDenominator::AllValid,
        )?;
        Ok(CurvePoint {
            iteration: record.iteration,
            best_nll: record.best_nll,
            kl_train: record.kl_train,
            kl_target: record.kl_target,
            f: report.f,
            r_norm: report.r_norm,
            c_norm: report.c_norm,
            p: report.p,
        })
    }

    fn prepare(&self, mode: &str) -> Result<()> {
        std::fs::create_dir_all(self.out_dir.join("cells"))?;
        std::fs::create_dir_all(self.out_dir.join("history"))?;
        let manifest_path = self.out_dir.join("manifest.json");
        let manifest = Manifest {
            version: RECORD_VERSION,
            mode: mode.to_string(),
            config: self.config.clone(),
        };
        if manifest_path.exists() {
            let existing: Manifest = read_json(&manifest_path)?;
            if existing != manifest {
                return Err(HarnessError::ManifestMismatch {
                    dir: self.out_dir.clone(),
                    detail: if existing.mode != manifest.mode {
                        format!("mode {} vs {}", existing.mode, manifest.mode)
                    } else {
                        "config fields differ".to_string()
                    },
                });
            }
        } else {
            write_json_atomic(&manifest_path, &manifest)?;
        }
        Ok(())
    }

    fn cell_path(&self, id: &str) -> PathBuf {
        self.out_dir.join("cells").join(format!("{id}.json"))
    }

    fn persist_cell(&self, cell: &Cell, record: &CellRecord) -> Result<()> {
        // clear any stale failure marker from an earlier attempt
        let _ = std::fs::remove_file(self.failure_path(&cell.id()));
        write_json_atomic(&self.cell_path(&cell.id()), record)
    }

    fn persist_baseline(&self, group: &str, record: &BaselineRecord) -> Result<()> {
        let _ = std::fs::remove_file(self.failure_path(group));
        write_json_atomic(&self.cell_path(group), record)
    }

    fn failure_path(&self, id: &str) -> PathBuf {
        self.out_dir.join("cells").join(format!("{id}.failed.json"))
    }

    fn persist_failure(&self, id: &str, error: &str) -> Result<()> {
        write_json_atomic(
            &self.failure_path(id),
            &serde_json::json!({ "cell": id, "error": error }),
        )
    }

    fn persist_history(
        &self,
        cell_id: &str,
        circuit: &qcbm::CircuitSpec,
        best_params: &[f64],
        history: &qcbm::TrainingHistory,
    ) -> Result<()> {
        std::fs::write(
            self.out_dir.join("history").join(format!("{cell_id}.csv")),
            history.to_csv(),
        )?;
        let doc = serde_json::json!({
            "circuit": serde_json::from_str::<serde_json::Value>(&circuit.to_json())?,
            "best_params": best_params,
        });
        write_json_atomic(
            &self.out_dir.join("history").join(format!("{cell_id}.params.json")),
            &doc,
        )
    }
}

pub fn cost_histogram(queries: &[Bitstring]) -> Vec<(i64, usize)> {
    let mut counts = std::collections::BTreeMap::new();
    for &q in queries {
        *counts.entry(separation_cost(q)).or_insert(0usize) += 1;
    }
    counts.into_iter().collect()
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| HarnessError::CorruptState {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })
}

fn write_json_atomic<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, serde_json::to_string_pretty(value)?)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cost_histogram_counts_by_value() {
        let queries: Vec<Bitstring> = ["1001", "1001", "1100", "0000"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        assert_eq!(
            cost_histogram(&queries),
            vec![(-3, 2), (-1, 1), (0, 1)]
        );
    }
}
