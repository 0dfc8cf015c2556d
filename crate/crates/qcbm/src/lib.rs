//! Quantum circuit Born machine simulation, training, and generalization
//! metrics for constrained bitstring distributions.
//!
//! The crate is organized bottom-up:
//! - [`bitstring`]: fixed-width bitstrings with the qubit-0-leftmost print
//!   convention used everywhere else.
//! - [`statevector`]: dense simulator with in-place RX/RZ/RXX kernels.
//! - [`ansatz`]: the hardware-efficient circuit layout and its parameter
//!   bookkeeping.
//! - [`datasets`]: constrained solution spaces, training-set sampling, and
//!   cost-based reweighting.
//! - [`trainer`]: negative log-likelihood objective minimized by a
//!   self-contained CMA-ES.
//! - [`metrics`]: validity- and quality-based generalization metrics plus
//!   the random-sampler baseline.

pub mod ansatz;
pub mod bitstring;
pub mod datasets;
pub mod error;
pub mod metrics;
#[cfg(any(test, feature = "oracle"))]
pub mod oracle;
pub mod statevector;
pub mod trainer;

pub use ansatz::{build_circuit, param_count, CircuitSpec, Topology};
pub use bitstring::Bitstring;
pub use datasets::{
    cardinality_space, evens_space, reweight_softmax, sample_training_set, separation_cost,
    temperature_from_costs, DatasetKind, RoundingMode, SolutionSpace, TrainingSet,
};
pub use error::{Error, Result};
pub use metrics::{
    aggregate, classify, evaluate, random_baseline, select_median_run, AggregateStat,
    BaselineSummary, Classification, MetricsReport, TailDenominator,
};
pub use statevector::StateVector;
pub use trainer::{
    cma_es_minimize, kl_divergence, model_distribution, nll_cost, train, train_with_observer,
    HistoryRecord, ProbabilityMode, TrainerConfig, TrainingHistory,
};
