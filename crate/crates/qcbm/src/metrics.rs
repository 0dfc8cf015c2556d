//! Generalization metrics for generated query batches.
//!
//! Queries are classified against the training set and the solution space:
//! memorized (in the training set), generalized (unseen and valid), or
//! noise (unseen and invalid). Validity-based metrics follow from the
//! counts; quality-based metrics (utility, tail probability) follow from
//! the cost function. Multiplicity conventions: g_train and g_sol_multi
//! count query multiplicity, g_sol_unique deduplicates.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::bitstring::Bitstring;
use crate::datasets::{SolutionSpace, TrainingSet};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    /// Total queries Q.
    pub q: usize,
    pub g_train: usize,
    pub g_new: usize,
    pub g_sol_multi: usize,
    pub g_sol_unique: usize,
}

/// Count memorized / generalized / noise queries. Training-set membership
/// is by sample identity; weights play no role here.
pub fn classify(
    queries: &[Bitstring],
    ts: &TrainingSet,
    space: &SolutionSpace,
) -> Result<Classification> {
    if queries.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if ts.n_bits() != space.n_bits() {
        return Err(Error::WidthMismatch {
            left: ts.n_bits(),
            right: space.n_bits(),
        });
    }
    for x in queries {
        if x.width() != space.n_bits() {
            return Err(Error::WidthMismatch {
                left: x.width(),
                right: space.n_bits(),
            });
        }
    }
    let train_members: HashSet<Bitstring> = ts.samples().iter().copied().collect();
    let mut unique_new_valid = HashSet::new();
    let mut g_train = 0usize;
    let mut g_sol_multi = 0usize;
    for &x in queries {
        if train_members.contains(&x) {
            g_train += 1;
        } else if space.is_valid(x) {
            g_sol_multi += 1;
            unique_new_valid.insert(x);
        }
    }
    Ok(Classification {
        q: queries.len(),
        g_train,
        g_new: queries.len() - g_train,
        g_sol_multi,
        g_sol_unique: unique_new_valid.len(),
    })
}

/// F = g_sol_multi / g_new. Absent when no query is unseen.
pub fn fidelity(c: &Classification) -> Option<f64> {
    (c.g_new > 0).then(|| c.g_sol_multi as f64 / c.g_new as f64)
}

/// R = g_sol_multi / Q.
pub fn rate(c: &Classification) -> f64 {
    c.g_sol_multi as f64 / c.q as f64
}

/// R̃ = R / (1 − ε): measured rate against the perfect-model expectation.
pub fn rate_normalized(rate: f64, epsilon: f64) -> f64 {
    rate / (1.0 - epsilon)
}

/// C = g_sol_unique / (|S| − D).
pub fn coverage(c: &Classification, space_size: usize, d_train: usize) -> f64 {
    c.g_sol_unique as f64 / (space_size - d_train) as f64
}

/// C̄ = 1 − (1 − 1/(|S|(1−ε)))^Q, the coverage a perfect model reaches in
/// expectation after Q queries. Evaluated as −expm1(Q·ln1p(−x)) so large Q
/// and tiny 1/(|S|(1−ε)) lose no precision.
pub fn coverage_expected(space_size: usize, epsilon: f64, q: usize) -> f64 {
    let x = 1.0 / (space_size as f64 * (1.0 - epsilon));
    -(q as f64 * (-x).ln_1p()).exp_m1()
}

/// C̃ = C / C̄.
pub fn coverage_normalized(coverage: f64, space_size: usize, epsilon: f64, q: usize) -> f64 {
    coverage / coverage_expected(space_size, epsilon, q)
}

/// Knowledge-free stand-in for C̃: g_sol_unique / Q, valid while
/// Q ≪ |S|(1−ε) keeps repeat hits rare.
pub fn coverage_asymptotic(c: &Classification) -> f64 {
    c.g_sol_unique as f64 / c.q as f64
}

/// p = (g_train + g_sol_multi) / Q: all valid queries, seen or unseen.
pub fn precision(c: &Classification) -> f64 {
    (c.g_train + c.g_sol_multi) as f64 / c.q as f64
}

/// E = g_new / Q.
pub fn exploration(c: &Classification) -> f64 {
    c.g_new as f64 / c.q as f64
}

/// U: mean cost of the ⌈0.05·n⌉ lowest-cost elements (multiplicity
/// counted, minimum one element). Absent for an empty multiset.
pub fn utility(unseen_valid: &[Bitstring], cost: impl Fn(Bitstring) -> i64) -> Option<f64> {
    if unseen_valid.is_empty() {
        return None;
    }
    let mut costs: Vec<i64> = unseen_valid.iter().map(|&x| cost(x)).collect();
    costs.sort_unstable();
    // ⌈n/20⌉ computed in integers; n ≥ 1 makes it at least 1
    let k = (costs.len() + 19) / 20;
    let sum: i128 = costs[..k].iter().map(|&c| c as i128).sum();
    Some(sum as f64 / k as f64)
}

/// Fraction of the batch with cost strictly below the threshold. Absent
/// for an empty batch.
pub fn tail_probability(
    batch: &[Bitstring],
    cost: impl Fn(Bitstring) -> i64,
    threshold: i64,
) -> Option<f64> {
    if batch.is_empty() {
        return None;
    }
    let below = batch.iter().filter(|&&x| cost(x) < threshold).count();
    Some(below as f64 / batch.len() as f64)
}

/// Which queries form the tail-probability denominator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailDenominator {
    /// All valid queries, memorized or not.
    #[default]
    AllValid,
    UnseenValid,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFlags {
    /// No unseen queries, so F has no denominator.
    pub f_absent: bool,
    /// Finite-sample fluctuation pushed R̃ past 1; reported as computed.
    pub r_norm_above_one: bool,
    pub c_norm_above_one: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    #[serde(flatten)]
    pub counts: Classification,
    pub epsilon: f64,
    pub d_train: usize,
    pub space_size: usize,
    pub f: Option<f64>,
    pub r: f64,
    pub r_norm: f64,
    pub c: f64,
    pub c_expected: f64,
    pub c_norm: f64,
    pub c_asymptotic: f64,
    pub p: f64,
    pub e: f64,
    pub u: Option<f64>,
    pub tail_threshold: Option<i64>,
    pub tail_prob: Option<f64>,
    #[serde(flatten)]
    pub flags: ReportFlags,
}

impl MetricsReport {
    pub const CSV_HEADER: &'static str = "q,g_train,g_new,g_sol_multi,g_sol_unique,epsilon,\
        d_train,space_size,f,r,r_norm,c,c_expected,c_norm,c_asymptotic,p,e,u,tail_threshold,\
        tail_prob,f_absent,r_norm_above_one,c_norm_above_one";

    pub fn to_csv_row(&self) -> String {
        fn opt_f(v: Option<f64>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.counts.q,
            self.counts.g_train,
            self.counts.g_new,
            self.counts.g_sol_multi,
            self.counts.g_sol_unique,
            self.epsilon,
            self.d_train,
            self.space_size,
            opt_f(self.f),
            self.r,
            self.r_norm,
            self.c,
            self.c_expected,
            self.c_norm,
            self.c_asymptotic,
            self.p,
            self.e,
            opt_f(self.u),
            self.tail_threshold.map(|t| t.to_string()).unwrap_or_default(),
            opt_f(self.tail_prob),
            self.flags.f_absent,
            self.flags.r_norm_above_one,
            self.flags.c_norm_above_one,
        )
    }

    /// F + R̃ + C̃, the score the median-run selection ranks by. Absent
    /// when F is absent.
    pub fn combined_score(&self) -> Option<f64> {
        self.f.map(|f| f + self.r_norm + self.c_norm)
    }
}

/// Classify a batch and compute the full report in one pass.
pub fn evaluate(
    queries: &[Bitstring],
    ts: &TrainingSet,
    space: &SolutionSpace,
    cost: impl Fn(Bitstring) -> i64,
    tail_threshold: Option<i64>,
    tail_denominator: TailDenominator,
) -> Result<MetricsReport> {
    if ts.kind() != space.kind() {
        return Err(Error::MalformedDocument {
            kind: "evaluation",
            detail: format!(
                "training set constraint {:?} does not match solution space {:?}",
                ts.kind(),
                space.kind()
            ),
        });
    }
    if space.size() <= ts.len() {
        return Err(Error::DegenerateTrainingSize {
            epsilon: ts.epsilon(),
            space_size: space.size(),
            d: ts.len(),
        });
    }
    let counts = classify(queries, ts, space)?;

    let train_members: HashSet<Bitstring> = ts.samples().iter().copied().collect();
    let mut unseen_valid = Vec::new();
    let mut all_valid = Vec::new();
    for &x in queries {
        let memorized = train_members.contains(&x);
        if memorized || space.is_valid(x) {
            all_valid.push(x);
            if !memorized {
                unseen_valid.push(x);
            }
        }
    }

    let f = fidelity(&counts);
    let r = rate(&counts);
    let r_norm = rate_normalized(r, ts.epsilon());
    let c = coverage(&counts, space.size(), ts.len());
    let c_expected = coverage_expected(space.size(), ts.epsilon(), counts.q);
    let c_norm = c / c_expected;
    let u = utility(&unseen_valid, &cost);
    let tail_prob = tail_threshold.and_then(|t| {
        let denom = match tail_denominator {
            TailDenominator::AllValid => &all_valid,
            TailDenominator::UnseenValid => &unseen_valid,
        };
        tail_probability(denom, &cost, t)
    });
    Ok(MetricsReport {
        counts,
        epsilon: ts.epsilon(),
        d_train: ts.len(),
        space_size: space.size(),
        f,
        r,
        r_norm,
        c,
        c_expected,
        c_norm,
        c_asymptotic: coverage_asymptotic(&counts),
        p: precision(&counts),
        e: exploration(&counts),
        u,
        tail_threshold,
        tail_prob,
        flags: ReportFlags {
            f_absent: f.is_none(),
            r_norm_above_one: r_norm > 1.0,
            c_norm_above_one: c_norm > 1.0,
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateStat {
    pub mean: f64,
    /// Sample standard deviation (ddof = 1) over √n; 0 for a single value.
    pub std_error: f64,
    pub n: usize,
}

pub fn aggregate(values: &[f64]) -> Option<AggregateStat> {
    if values.is_empty() {
        return None;
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let std_error = if n > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    Some(AggregateStat { mean, std_error, n })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineSummary {
    pub reports: Vec<MetricsReport>,
    pub f: Option<AggregateStat>,
    pub r: AggregateStat,
    pub r_norm: AggregateStat,
    pub c: AggregateStat,
    pub c_norm: AggregateStat,
    pub p: AggregateStat,
    pub e: AggregateStat,
    pub u: Option<AggregateStat>,
    pub tail_prob: Option<AggregateStat>,
}

/// Draw `q` bitstrings uniformly from the whole 2^N search space, `runs`
/// times, and aggregate the per-run reports (mean ± σ/√runs).
pub fn random_baseline<R: Rng + ?Sized>(
    space: &SolutionSpace,
    ts: &TrainingSet,
    q: usize,
    runs: usize,
    rng: &mut R,
    cost: impl Fn(Bitstring) -> i64 + Copy,
    tail_threshold: Option<i64>,
) -> Result<BaselineSummary> {
    if runs == 0 {
        return Err(Error::TooFewSamples(0));
    }
    if q == 0 {
        return Err(Error::EmptyBatch);
    }
    let width = space.n_bits();
    let dim = 1u64 << width;
    let mut reports = Vec::with_capacity(runs);
    for _ in 0..runs {
        let queries: Vec<Bitstring> = (0..q)
            .map(|_| {
                Bitstring::from_index_unchecked(rng.random_range(0..dim) as usize, width)
            })
            .collect();
        reports.push(evaluate(
            &queries,
            ts,
            space,
            cost,
            tail_threshold,
            TailDenominator::AllValid,
        )?);
    }
    let collect = |get: fn(&MetricsReport) -> f64| -> AggregateStat {
        aggregate(&reports.iter().map(get).collect::<Vec<_>>()).expect("runs >= 1")
    };
    let collect_opt = |get: fn(&MetricsReport) -> Option<f64>| -> Option<AggregateStat> {
        aggregate(&reports.iter().filter_map(get).collect::<Vec<_>>())
    };
    Ok(BaselineSummary {
        f: collect_opt(|r| r.f),
        r: collect(|r| r.r),
        r_norm: collect(|r| r.r_norm),
        c: collect(|r| r.c),
        c_norm: collect(|r| r.c_norm),
        p: collect(|r| r.p),
        e: collect(|r| r.e),
        u: collect_opt(|r| r.u),
        tail_prob: collect_opt(|r| r.tail_prob),
        reports,
    })
}

/// Index of the run whose combined score F + R̃ + C̃ is the median.
/// Runs with absent F are excluded; even counts take the lower middle;
/// equal scores resolve to the lowest run index.
pub fn select_median_run(reports: &[MetricsReport]) -> Result<usize> {
    let mut scored: Vec<(f64, usize)> = reports
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.combined_score().map(|s| (s, i)))
        .collect();
    if scored.is_empty() {
        return Err(Error::MedianUndefined);
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(scored[(scored.len() - 1) / 2].1)
}
