//! Negative log-likelihood training of Born machine circuits with a
//! self-contained CMA-ES.
//!
//! The objective feeds exact Born probabilities to the NLL by default; a
//! shot-based estimate is available behind [`ProbabilityMode::Sampled`]
//! for parity with hardware-style workflows. KL divergences are logged
//! against exact probabilities either way.

mod cma;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::ansatz::CircuitSpec;
use crate::datasets::TrainingSet;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ProbabilityMode {
    /// Exact Born probabilities from the statevector.
    Exact,
    /// Empirical frequencies from `shots` draws; deterministic per
    /// (trainer seed, evaluation index).
    Sampled { shots: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainerConfig {
    pub max_iterations: u64,
    /// λ; default 4 + ⌊3·ln P⌋.
    pub population_size: Option<usize>,
    /// σ₀.
    pub initial_step: f64,
    pub seed: u64,
    /// Stop once the best objective value reaches this threshold.
    pub convergence_threshold: Option<f64>,
    pub log_every: u64,
    pub nll_floor: f64,
    /// Fixed starting mean; default uniform over [−π, π)^P.
    pub initial_mean: Option<Vec<f64>>,
    pub probability_mode: ProbabilityMode,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            population_size: None,
            initial_step: 0.2,
            seed: 0,
            convergence_threshold: None,
            log_every: 10,
            nll_floor: 1e-8,
            initial_mean: None,
            probability_mode: ProbabilityMode::Exact,
        }
    }
}

impl TrainerConfig {
    /// Check every knob against an objective dimension without running.
    pub fn validate_for(&self, dim: usize) -> Result<()> {
        self.resolved_lambda(dim).map(|_| ())
    }

    fn resolved_lambda(&self, dim: usize) -> Result<usize> {
        if dim == 0 {
            return Err(Error::InvalidTrainerConfig(
                "objective dimension must be at least 1".into(),
            ));
        }
        if !self.initial_step.is_finite() || self.initial_step <= 0.0 {
            return Err(Error::InvalidTrainerConfig(format!(
                "initial_step must be positive, got {}",
                self.initial_step
            )));
        }
        if self.log_every == 0 {
            return Err(Error::InvalidTrainerConfig("log_every must be at least 1".into()));
        }
        if !self.nll_floor.is_finite() || self.nll_floor <= 0.0 {
            return Err(Error::InvalidTrainerConfig(format!(
                "nll_floor must be positive, got {}",
                self.nll_floor
            )));
        }
        if let ProbabilityMode::Sampled { shots } = self.probability_mode {
            if shots == 0 {
                return Err(Error::InvalidTrainerConfig(
                    "sampled probability mode needs at least 1 shot".into(),
                ));
            }
        }
        if let Some(mean) = &self.initial_mean {
            if mean.len() != dim {
                return Err(Error::ParamCountMismatch {
                    expected: dim,
                    got: mean.len(),
                });
            }
        }
        let lambda = self
            .population_size
            .unwrap_or_else(|| 4 + (3.0 * (dim as f64).ln()).floor() as usize);
        if lambda < 4 {
            return Err(Error::InvalidTrainerConfig(format!(
                "population_size must be at least 4, got {lambda}"
            )));
        }
        Ok(lambda)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryRecord {
    pub iteration: u64,
    /// Best-ever objective value at this point; non-increasing.
    pub best_nll: f64,
    pub kl_train: Option<f64>,
    pub kl_target: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingHistory {
    pub records: Vec<HistoryRecord>,
    pub warnings: Vec<String>,
    pub evaluations: usize,
}

impl TrainingHistory {
    pub const CSV_HEADER: &'static str = "iteration,best_nll,kl_train,kl_target";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let kl_train = r.kl_train.map(|v| v.to_string()).unwrap_or_default();
            let kl_target = r.kl_target.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.iteration, r.best_nll, kl_train, kl_target
            ));
        }
        out
    }
}

/// Exact Born probabilities of the circuit at `params`.
pub fn model_distribution(circuit: &CircuitSpec, params: &[f64]) -> Result<Vec<f64>> {
    Ok(circuit.execute(params)?.probabilities())
}

/// Empirical frequencies from `shots` Born-rule draws.
pub fn model_distribution_sampled<R: Rng + ?Sized>(
    circuit: &CircuitSpec,
    params: &[f64],
    shots: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if shots == 0 {
        return Err(Error::EmptyBatch);
    }
    let state = circuit.execute(params)?;
    let mut freq = vec![0.0; 1 << circuit.n_qubits()];
    let inv = 1.0 / shots as f64;
    for draw in state.sample(shots, rng) {
        freq[draw.index()] += inv;
    }
    Ok(freq)
}

/// −Σ_t w_t · ln(max(floor, P_model(x_t))); the floor absorbs zero model
/// probability on training points.
pub fn nll_cost(ts: &TrainingSet, model_probs: &[f64], floor: f64) -> f64 {
    debug_assert_eq!(model_probs.len(), 1 << ts.n_bits());
    debug_assert!(
        (model_probs.iter().sum::<f64>() - 1.0).abs() < 1e-6,
        "model probabilities must sum to 1"
    );
    -ts.samples()
        .iter()
        .zip(ts.weights())
        .map(|(x, w)| w * model_probs[x.index()].max(floor).ln())
        .sum::<f64>()
}

/// Σ_x p(x)·ln(p(x)/max(floor, q(x))) over the support of p, in nats.
pub fn kl_divergence(p: &[f64], q: &[f64], floor: f64) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    debug_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-6);
    debug_assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-6);
    p.iter()
        .zip(q)
        .filter(|(pi, _)| **pi > 0.0)
        .map(|(pi, qi)| pi * (pi / qi.max(floor)).ln())
        .sum()
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Shared ask/evaluate/tell loop. `objective` receives a global evaluation
/// index so stochastic objectives stay deterministic under parallel
/// evaluation; `on_log` turns logging points into history records.
fn run_loop<F, G>(
    objective: F,
    dim: usize,
    config: &TrainerConfig,
    mut on_log: G,
) -> Result<(Vec<f64>, TrainingHistory)>
where
    F: Fn(usize, &[f64]) -> f64 + Sync,
    G: FnMut(u64, f64, &[f64]) -> HistoryRecord,
{
    let lambda = config.resolved_lambda(dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mean = config
        .initial_mean
        .clone()
        .unwrap_or_else(|| (0..dim).map(|_| rng.random_range(-PI..PI)).collect());
    let mut cma = cma::Cmaes::new(dim, mean, config.initial_step, lambda);

    let mut history = TrainingHistory::default();
    let mean_value = objective(0, cma.mean());
    history.evaluations = 1;
    cma.consider(&cma.mean().to_vec(), mean_value);
    history
        .records
        .push(on_log(0, cma.best_value(), cma.best_params()));

    let mut next_eval = 1usize;
    for iteration in 1..=config.max_iterations {
        let candidates = cma.ask(&mut rng);
        let values: Vec<f64> = candidates
            .par_iter()
            .enumerate()
            .map(|(k, x)| objective(next_eval + k, x))
            .collect();
        next_eval += lambda;
        history.evaluations += lambda;
        cma.tell(&candidates, &values);

        let converged = config
            .convergence_threshold
            .is_some_and(|alpha| cma.best_value() <= alpha);
        if iteration % config.log_every == 0 || iteration == config.max_iterations || converged {
            history
                .records
                .push(on_log(iteration, cma.best_value(), cma.best_params()));
        }
        if converged {
            break;
        }
    }
    let (best, warnings) = cma.into_best();
    history.warnings = warnings;
    Ok((best, history))
}

/// Minimize an arbitrary objective. History records carry the best-ever
/// value; the KL columns stay empty.
pub fn cma_es_minimize<F>(
    objective: F,
    dim: usize,
    config: &TrainerConfig,
) -> Result<(Vec<f64>, TrainingHistory)>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    run_loop(
        |_, x| objective(x),
        dim,
        config,
        |iteration, best, _| HistoryRecord {
            iteration,
            best_nll: best,
            kl_train: None,
            kl_target: None,
        },
    )
}

/// Train the circuit to minimize the training-set NLL. Every logged record
/// carries KL(P_train‖P_model), plus KL(target‖P_model) when a target
/// distribution over the full 2^N search space is supplied.
pub fn train(
    circuit: &CircuitSpec,
    ts: &TrainingSet,
    config: &TrainerConfig,
    target: Option<&[f64]>,
) -> Result<(Vec<f64>, TrainingHistory)> {
    train_with_observer(circuit, ts, config, target, |_, _| {})
}

/// [`train`], additionally invoking `observer` with each history record
/// and the best parameters at that point (for mid-training evaluation).
pub fn train_with_observer(
    circuit: &CircuitSpec,
    ts: &TrainingSet,
    config: &TrainerConfig,
    target: Option<&[f64]>,
    mut observer: impl FnMut(&HistoryRecord, &[f64]),
) -> Result<(Vec<f64>, TrainingHistory)> {
    if ts.n_bits() != circuit.n_qubits() {
        return Err(Error::WidthMismatch {
            left: ts.n_bits(),
            right: circuit.n_qubits(),
        });
    }
    let table_len = 1usize << circuit.n_qubits();
    if let Some(t) = target {
        if t.len() != table_len {
            return Err(Error::WidthMismatch {
                left: t.len(),
                right: table_len,
            });
        }
    }
    let floor = config.nll_floor;
    let mut train_table = vec![0.0; table_len];
    for (x, w) in ts.samples().iter().zip(ts.weights()) {
        train_table[x.index()] = *w;
    }

    let mode = config.probability_mode;
    let shot_salt = splitmix64(config.seed ^ 0x5e15_ed_u64);
    let objective = |eval_index: usize, params: &[f64]| -> f64 {
        let probs = match mode {
            ProbabilityMode::Exact => circuit
                .execute(params)
                .expect("validated circuit executes")
                .probabilities(),
            ProbabilityMode::Sampled { shots } => {
                let mut rng =
                    ChaCha8Rng::seed_from_u64(splitmix64(shot_salt ^ eval_index as u64));
                model_distribution_sampled(circuit, params, shots, &mut rng)
                    .expect("validated circuit samples")
            }
        };
        nll_cost(ts, &probs, floor)
    };

    run_loop(objective, circuit.param_count(), config, |iteration, best, params| {
        let probs = circuit
            .execute(params)
            .expect("validated circuit executes")
            .probabilities();
        let record = HistoryRecord {
            iteration,
            best_nll: best,
            kl_train: Some(kl_divergence(&train_table, &probs, floor)),
            kl_target: target.map(|t| kl_divergence(t, &probs, floor)),
        };
        observer(&record, params);
        record
    })
}
