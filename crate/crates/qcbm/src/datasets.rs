//! Constrained solution spaces and the training sets drawn from them.
//!
//! Two benchmark families: fixed-cardinality bitstrings (exactly k ones)
//! and even-parity bitstrings. Training sets are uniform draws without
//! replacement; quality-based experiments reweight them through a softmax
//! over an integer cost.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitstring::Bitstring;
use crate::error::{Error, Result};
use crate::statevector::MAX_QUBITS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetKind {
    Cardinality { k: usize },
    Evens,
}

#[derive(Clone, Debug)]
pub struct SolutionSpace {
    n_bits: usize,
    kind: DatasetKind,
    members: Vec<Bitstring>,
}

/// Bitstrings with exactly `k` ones among `n_bits`.
pub fn cardinality_space(n_bits: usize, k: usize) -> Result<SolutionSpace> {
    check_width(n_bits)?;
    if k > n_bits {
        return Err(Error::CardinalityOutOfRange { n_bits, k });
    }
    build_space(n_bits, DatasetKind::Cardinality { k })
}

/// Bitstrings with an even number of ones among `n_bits`.
pub fn evens_space(n_bits: usize) -> Result<SolutionSpace> {
    check_width(n_bits)?;
    build_space(n_bits, DatasetKind::Evens)
}

fn check_width(n_bits: usize) -> Result<()> {
    if n_bits == 0 || n_bits > MAX_QUBITS {
        return Err(Error::InvalidBitWidth(n_bits));
    }
    Ok(())
}

fn build_space(n_bits: usize, kind: DatasetKind) -> Result<SolutionSpace> {
    let members: Vec<Bitstring> = (0..1usize << n_bits)
        .map(|i| Bitstring::from_index_unchecked(i, n_bits))
        .filter(|x| kind_accepts(kind, *x))
        .collect();
    if members.len() < 2 {
        return Err(Error::DegenerateSpace(format!(
            "{kind:?} over {n_bits} bits has {} member(s); nothing to generalize over",
            members.len()
        )));
    }
    Ok(SolutionSpace {
        n_bits,
        kind,
        members,
    })
}

fn kind_accepts(kind: DatasetKind, x: Bitstring) -> bool {
    match kind {
        DatasetKind::Cardinality { k } => x.count_ones() as usize == k,
        DatasetKind::Evens => x.count_ones() % 2 == 0,
    }
}

impl SolutionSpace {
    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn kind(&self) -> DatasetKind {
        self.kind
    }

    /// Members in ascending basis-index order.
    pub fn members(&self) -> &[Bitstring] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    /// Validity predicate, recomputed from the constraint (no set lookup).
    pub fn is_valid(&self, x: Bitstring) -> bool {
        x.width() == self.n_bits && kind_accepts(self.kind, x)
    }

    /// Uniform target distribution over the full 2^N search space: 1/|S|
    /// on members, 0 elsewhere.
    pub fn target_distribution(&self) -> Vec<f64> {
        let mut p = vec![0.0; 1 << self.n_bits];
        let weight = 1.0 / self.members.len() as f64;
        for m in &self.members {
            p[m.index()] = weight;
        }
        p
    }
}

/// Largest gap between consecutive 1-positions, negated: lower is better.
/// Bitstrings with fewer than two 1s cost 0.
pub fn separation_cost(x: Bitstring) -> i64 {
    let mut positions = x.one_positions();
    let Some(first) = positions.next() else {
        return 0;
    };
    let mut prev = first;
    let mut max_gap = 0usize;
    let mut seen_pair = false;
    for p in positions {
        max_gap = max_gap.max(p - prev);
        prev = p;
        seen_pair = true;
    }
    if seen_pair {
        -(max_gap as i64)
    } else {
        0
    }
}

/// How ε·|S| is turned into the integer training-set size D.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundingMode {
    /// Round half away from zero (half-up for the positive sizes here).
    #[default]
    HalfUp,
    /// Truncate. ε = 0.1 on the 2048-member evens space gives D = 204.
    Floor,
}

impl RoundingMode {
    fn apply(self, x: f64) -> usize {
        match self {
            RoundingMode::HalfUp => x.round() as usize,
            RoundingMode::Floor => x.floor() as usize,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingSet {
    n_bits: usize,
    kind: DatasetKind,
    epsilon: f64,
    seed: u64,
    beta: f64,
    samples: Vec<Bitstring>,
    weights: Vec<f64>,
}

const TRAINING_SET_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct TrainingSetHeader {
    version: u32,
    n_bits: usize,
    #[serde(flatten)]
    kind: DatasetKind,
    epsilon: f64,
    seed: u64,
    beta: f64,
    samples: usize,
}

/// Draw D = round(ε·|S|) distinct members uniformly, with the default
/// half-up rounding.
pub fn sample_training_set(
    space: &SolutionSpace,
    epsilon: f64,
    seed: u64,
) -> Result<TrainingSet> {
    sample_training_set_with_rounding(space, epsilon, RoundingMode::HalfUp, seed)
}

pub fn sample_training_set_with_rounding(
    space: &SolutionSpace,
    epsilon: f64,
    rounding: RoundingMode,
    seed: u64,
) -> Result<TrainingSet> {
    if !epsilon.is_finite() || epsilon <= 0.0 || epsilon >= 1.0 {
        return Err(Error::TrainingFractionOutOfRange(epsilon));
    }
    let d = rounding.apply(epsilon * space.size() as f64);
    if d == 0 || d >= space.size() {
        return Err(Error::DegenerateTrainingSize {
            epsilon,
            space_size: space.size(),
            d,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: Vec<Bitstring> = rand::seq::index::sample(&mut rng, space.size(), d)
        .into_iter()
        .map(|i| space.members()[i])
        .collect();
    chosen.sort_unstable();
    let weights = vec![1.0 / d as f64; d];
    Ok(TrainingSet {
        n_bits: space.n_bits(),
        kind: space.kind(),
        epsilon,
        seed,
        beta: 0.0,
        samples: chosen,
        weights,
    })
}

impl TrainingSet {
    /// Build a set directly from samples and weights, validating the same
    /// invariants `sample_training_set` guarantees.
    pub fn from_parts(
        n_bits: usize,
        kind: DatasetKind,
        epsilon: f64,
        seed: u64,
        beta: f64,
        samples: Vec<Bitstring>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        check_width(n_bits)?;
        if !epsilon.is_finite() || epsilon <= 0.0 || epsilon >= 1.0 {
            return Err(Error::TrainingFractionOutOfRange(epsilon));
        }
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::NegativeBeta(beta));
        }
        if samples.is_empty() {
            return Err(Error::EmptyBatch);
        }
        if samples.len() != weights.len() {
            return Err(Error::WidthMismatch {
                left: samples.len(),
                right: weights.len(),
            });
        }
        let mut seen = std::collections::HashSet::new();
        for s in &samples {
            if s.width() != n_bits {
                return Err(Error::WidthMismatch {
                    left: s.width(),
                    right: n_bits,
                });
            }
            if !kind_accepts(kind, *s) {
                return Err(Error::MalformedDocument {
                    kind: "training_set",
                    detail: format!("sample {s} violates the {kind:?} constraint"),
                });
            }
            if !seen.insert(*s) {
                return Err(Error::MalformedDocument {
                    kind: "training_set",
                    detail: format!("duplicate sample {s}"),
                });
            }
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::MalformedDocument {
                kind: "training_set",
                detail: format!("weights must be nonnegative and sum to 1, got {total}"),
            });
        }
        Ok(Self {
            n_bits,
            kind,
            epsilon,
            seed,
            beta,
            samples,
            weights,
        })
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn kind(&self) -> DatasetKind {
        self.kind
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Inverse temperature of the last reweighting; 0 means uniform.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Bitstring] {
        &self.samples
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// One line per sample after a JSON header; weights print in Rust's
    /// shortest round-trip form so import reproduces them bit-exactly.
    pub fn to_text(&self) -> String {
        let header = TrainingSetHeader {
            version: TRAINING_SET_VERSION,
            n_bits: self.n_bits,
            kind: self.kind,
            epsilon: self.epsilon,
            seed: self.seed,
            beta: self.beta,
            samples: self.samples.len(),
        };
        let mut out = serde_json::to_string(&header).expect("header serializes");
        out.push('\n');
        for (s, w) in self.samples.iter().zip(&self.weights) {
            out.push_str(&format!("{s} {w}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header_line = lines.next().ok_or(Error::MalformedDocument {
            kind: "training_set",
            detail: "empty document".into(),
        })?;
        let header: TrainingSetHeader = serde_json::from_str(header_line)?;
        if header.version != TRAINING_SET_VERSION {
            return Err(Error::UnsupportedVersion {
                expected: TRAINING_SET_VERSION,
                got: header.version,
            });
        }
        let mut samples = Vec::with_capacity(header.samples);
        let mut weights = Vec::with_capacity(header.samples);
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let mut fields = line.split_whitespace();
            let (Some(bits), Some(weight), None) =
                (fields.next(), fields.next(), fields.next())
            else {
                return Err(Error::MalformedDocument {
                    kind: "training_set",
                    detail: format!("expected '<bitstring> <weight>', got {line:?}"),
                });
            };
            samples.push(bits.parse::<Bitstring>()?);
            weights.push(weight.parse::<f64>().map_err(|_| Error::MalformedDocument {
                kind: "training_set",
                detail: format!("unparseable weight {weight:?}"),
            })?);
        }
        if samples.len() != header.samples {
            return Err(Error::MalformedDocument {
                kind: "training_set",
                detail: format!(
                    "header declares {} samples, found {}",
                    header.samples,
                    samples.len()
                ),
            });
        }
        Self::from_parts(
            header.n_bits,
            header.kind,
            header.epsilon,
            header.seed,
            header.beta,
            samples,
            weights,
        )
    }
}

/// Replace the weights with softmax(−β·cost) over the sample set. The
/// sample set itself is unchanged. Exponents are max-shifted, which leaves
/// the weights invariant and avoids overflow at large β.
pub fn reweight_softmax(
    ts: &TrainingSet,
    cost: impl Fn(Bitstring) -> i64,
    beta: f64,
) -> Result<TrainingSet> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::NegativeBeta(beta));
    }
    let scores: Vec<f64> = ts.samples().iter().map(|&x| -beta * cost(x) as f64).collect();
    let max_score = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let unnormalized: Vec<f64> = scores.iter().map(|s| (s - max_score).exp()).collect();
    let total: f64 = unnormalized.iter().sum();
    let mut out = ts.clone();
    out.beta = beta;
    out.weights = unnormalized.into_iter().map(|u| u / total).collect();
    Ok(out)
}

/// Population standard deviation of the training-set costs, the T behind
/// the stock reweighting temperatures β = 1/T and β = 2/T.
pub fn temperature_from_costs(
    ts: &TrainingSet,
    cost: impl Fn(Bitstring) -> i64,
) -> Result<f64> {
    if ts.len() < 2 {
        return Err(Error::TooFewSamples(ts.len()));
    }
    let costs: Vec<f64> = ts.samples().iter().map(|&x| cost(x) as f64).collect();
    let mean = costs.iter().sum::<f64>() / costs.len() as f64;
    let variance = costs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / costs.len() as f64;
    let sigma = variance.sqrt();
    if sigma == 0.0 {
        return Err(Error::ZeroCostSpread);
    }
    Ok(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn bits(s: &str) -> Bitstring {
        s.parse().unwrap()
    }

    #[test]
    fn cardinality_sizes() {
        assert_eq!(cardinality_space(12, 6).unwrap().size(), 924);
        assert_eq!(cardinality_space(4, 2).unwrap().size(), 6);
    }

    #[test]
    fn cardinality_4_2_exact_members() {
        let space = cardinality_space(4, 2).unwrap();
        let printed: HashSet<String> = space.members().iter().map(|m| m.to_string()).collect();
        let expected: HashSet<String> = ["0011", "0101", "0110", "1001", "1010", "1100"]
            .into_iter()
            .map(String::from)
            .collect();
        assert_eq!(printed, expected);
    }

    #[test]
    fn cardinality_sizes_match_binomial_for_all_small_shapes() {
        // Pascal's triangle as an independent reference.
        let mut binom = vec![vec![1u64]];
        for n in 1..=14 {
            let prev = &binom[n - 1];
            let mut row = vec![1u64];
            for k in 1..n {
                row.push(prev[k - 1] + prev[k]);
            }
            row.push(1);
            binom.push(row);
        }
        for n in 2..=14usize {
            for k in 0..=n {
                let expected = binom[n][k];
                match cardinality_space(n, k) {
                    Ok(space) => assert_eq!(space.size() as u64, expected, "n={n} k={k}"),
                    Err(_) => assert!(expected < 2, "n={n} k={k} should not be degenerate"),
                }
            }
        }
    }

    #[test]
    fn validity_follows_the_constraint() {
        let space = cardinality_space(8, 4).unwrap();
        assert!(space.is_valid(bits("10001011")));
        assert!(!space.is_valid(bits("10001111")));
        // width mismatch is never valid
        assert!(!space.is_valid(bits("1010")));

        let evens = evens_space(8).unwrap();
        assert!(evens.is_valid(bits("01010011")));
        assert!(!evens.is_valid(bits("00010000")));
    }

    #[test]
    fn evens_counts_and_membership() {
        let space = evens_space(12).unwrap();
        assert_eq!(space.size(), 2048);
        assert!(space.members().iter().all(|m| m.count_ones() % 2 == 0));

        let small = evens_space(4).unwrap();
        assert!(!small.is_valid(bits("0001")));
    }

    #[test]
    fn members_are_exactly_the_predicate_holders() {
        for space in [cardinality_space(6, 2).unwrap(), evens_space(6).unwrap()] {
            let member_set: HashSet<usize> = space.members().iter().map(|m| m.index()).collect();
            for i in 0..1usize << 6 {
                let x = Bitstring::new(i as u32, 6).unwrap();
                assert_eq!(member_set.contains(&i), space.is_valid(x));
            }
        }
    }

    #[test]
    fn degenerate_spaces_are_rejected() {
        assert!(matches!(
            cardinality_space(4, 0),
            Err(Error::DegenerateSpace(_))
        ));
        assert!(matches!(
            cardinality_space(4, 4),
            Err(Error::DegenerateSpace(_))
        ));
        assert!(matches!(
            cardinality_space(4, 5),
            Err(Error::CardinalityOutOfRange { n_bits: 4, k: 5 })
        ));
        assert!(evens_space(1).is_err());
        assert!(evens_space(0).is_err());
        assert!(evens_space(21).is_err());
    }

    #[test]
    fn separation_cost_goldens() {
        assert_eq!(separation_cost(bits("11010001")), -4);
        assert_eq!(separation_cost(bits("100000000001")), -11);
        assert_eq!(separation_cost(bits("111111111111")), -1);
        assert_eq!(separation_cost(bits("010000000000")), 0);
        assert_eq!(separation_cost(bits("000000000000")), 0);
    }

    #[test]
    fn separation_cost_agrees_with_string_scan_oracle_on_all_12_bit_strings() {
        for i in 0..1u32 << 12 {
            let x = Bitstring::new(i, 12).unwrap();
            let printed = x.to_string();
            let positions: Vec<usize> = printed
                .char_indices()
                .filter(|(_, c)| *c == '1')
                .map(|(p, _)| p)
                .collect();
            let expected = if positions.len() < 2 {
                0
            } else {
                -(positions.windows(2).map(|w| w[1] - w[0]).max().unwrap() as i64)
            };
            assert_eq!(separation_cost(x), expected, "at {printed}");
        }
    }

    #[test]
    fn training_set_sizes_per_rounding_rule() {
        let card = cardinality_space(12, 6).unwrap();
        assert_eq!(sample_training_set(&card, 0.3, 1).unwrap().len(), 277);

        let evens = evens_space(12).unwrap();
        assert_eq!(sample_training_set(&evens, 0.1, 1).unwrap().len(), 205);
        assert_eq!(
            sample_training_set_with_rounding(&evens, 0.1, RoundingMode::Floor, 1)
                .unwrap()
                .len(),
            204
        );

        // exact half: 0.25·6 = 1.5
        let six = cardinality_space(4, 2).unwrap();
        assert_eq!(sample_training_set(&six, 0.25, 1).unwrap().len(), 2);
        assert_eq!(
            sample_training_set_with_rounding(&six, 0.25, RoundingMode::Floor, 1)
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn training_set_samples_are_distinct_valid_and_uniformly_weighted() {
        let space = cardinality_space(12, 6).unwrap();
        let ts = sample_training_set(&space, 0.3, 42).unwrap();
        let unique: HashSet<_> = ts.samples().iter().collect();
        assert_eq!(unique.len(), ts.len());
        assert!(ts.samples().iter().all(|&s| space.is_valid(s)));
        assert!(ts.weights().iter().all(|&w| (w - 1.0 / 277.0).abs() < 1e-15));
        assert!((ts.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn same_seed_reproduces_the_set() {
        let space = evens_space(10).unwrap();
        let a = sample_training_set(&space, 0.2, 9).unwrap();
        let b = sample_training_set(&space, 0.2, 9).unwrap();
        let c = sample_training_set(&space, 0.2, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.samples(), c.samples());
    }

    #[test]
    fn degenerate_training_sizes_are_rejected() {
        let six = cardinality_space(4, 2).unwrap();
        assert!(matches!(
            sample_training_set(&six, 0.05, 1),
            Err(Error::DegenerateTrainingSize { d: 0, .. })
        ));
        assert!(matches!(
            sample_training_set(&six, 0.95, 1),
            Err(Error::DegenerateTrainingSize { d: 6, .. })
        ));
        assert!(matches!(
            sample_training_set(&six, 0.0, 1),
            Err(Error::TrainingFractionOutOfRange(_))
        ));
        assert!(matches!(
            sample_training_set(&six, 1.0, 1),
            Err(Error::TrainingFractionOutOfRange(_))
        ));
    }

    #[test]
    fn reweight_beta_zero_is_uniform() {
        let space = cardinality_space(8, 4).unwrap();
        let ts = sample_training_set(&space, 0.2, 5).unwrap();
        let rw = reweight_softmax(&ts, separation_cost, 0.0).unwrap();
        assert_eq!(rw.samples(), ts.samples());
        let uniform = 1.0 / ts.len() as f64;
        assert!(rw.weights().iter().all(|&w| (w - uniform).abs() < 1e-15));
    }

    #[test]
    fn reweight_two_sample_golden() {
        // costs −1 and −2 at β = 1: weights e¹/(e¹+e²) and e²/(e¹+e²)
        let samples = vec![bits("1100"), bits("1010")]; // costs −1, −2
        assert_eq!(separation_cost(samples[0]), -1);
        assert_eq!(separation_cost(samples[1]), -2);
        let ts = TrainingSet::from_parts(
            4,
            DatasetKind::Cardinality { k: 2 },
            0.3,
            0,
            0.0,
            samples,
            vec![0.5, 0.5],
        )
        .unwrap();
        let rw = reweight_softmax(&ts, separation_cost, 1.0).unwrap();
        let e = std::f64::consts::E;
        assert!((rw.weights()[0] - e / (e + e * e)).abs() < 1e-12);
        assert!((rw.weights()[1] - e * e / (e + e * e)).abs() < 1e-12);
        assert!((rw.weights()[0] - 0.2689).abs() < 5e-5);
        assert!((rw.weights()[1] - 0.7311).abs() < 5e-5);
    }

    #[test]
    fn reweight_is_permutation_equivariant() {
        let a = vec![bits("110100"), bits("101010"), bits("100110")];
        let b = vec![a[2], a[0], a[1]];
        let make = |samples: Vec<Bitstring>| {
            TrainingSet::from_parts(
                6,
                DatasetKind::Cardinality { k: 3 },
                0.15,
                0,
                0.0,
                samples,
                vec![1.0 / 3.0; 3],
            )
            .unwrap()
        };
        let wa = reweight_softmax(&make(a.clone()), separation_cost, 0.7).unwrap();
        let wb = reweight_softmax(&make(b.clone()), separation_cost, 0.7).unwrap();
        for (i, s) in a.iter().enumerate() {
            let j = b.iter().position(|x| x == s).unwrap();
            assert!((wa.weights()[i] - wb.weights()[j]).abs() < 1e-15);
        }
    }

    #[test]
    fn reweight_survives_extreme_beta() {
        let samples = vec![bits("110000000000"), bits("100000000001")]; // costs −1, −11
        let ts = TrainingSet::from_parts(
            12,
            DatasetKind::Cardinality { k: 2 },
            0.1,
            0,
            0.0,
            samples,
            vec![0.5, 0.5],
        )
        .unwrap();
        let rw = reweight_softmax(&ts, separation_cost, 50.0).unwrap();
        assert!(rw.weights().iter().all(|w| w.is_finite()));
        assert!((rw.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(rw.weights()[1] > 0.999999);
    }

    #[test]
    fn reweight_rejects_negative_beta() {
        let space = cardinality_space(6, 3).unwrap();
        let ts = sample_training_set(&space, 0.2, 3).unwrap();
        assert!(matches!(
            reweight_softmax(&ts, separation_cost, -0.5),
            Err(Error::NegativeBeta(_))
        ));
    }

    #[test]
    fn temperature_two_point_golden() {
        let samples = vec![bits("1100"), bits("1001")]; // costs −1, −3
        assert_eq!(separation_cost(samples[1]), -3);
        let ts = TrainingSet::from_parts(
            4,
            DatasetKind::Cardinality { k: 2 },
            0.3,
            0,
            0.0,
            samples,
            vec![0.5, 0.5],
        )
        .unwrap();
        let t = temperature_from_costs(&ts, separation_cost).unwrap();
        assert!((t - 1.0).abs() < 1e-15);
    }

    #[test]
    fn temperature_rejects_flat_costs() {
        let samples = vec![bits("1100"), bits("0110"), bits("0011")]; // all cost −1
        let ts = TrainingSet::from_parts(
            4,
            DatasetKind::Cardinality { k: 2 },
            0.5,
            0,
            0.0,
            samples,
            vec![1.0 / 3.0; 3],
        )
        .unwrap();
        assert!(matches!(
            temperature_from_costs(&ts, separation_cost),
            Err(Error::ZeroCostSpread)
        ));
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let space = evens_space(12).unwrap();
        let ts = sample_training_set(&space, 0.1, 77).unwrap();
        let t = temperature_from_costs(&ts, separation_cost).unwrap();
        let rw = reweight_softmax(&ts, separation_cost, 2.0 / t).unwrap();
        let text = rw.to_text();
        let back = TrainingSet::from_text(&text).unwrap();
        assert_eq!(back, rw);
        // weights carry irrational values; equality above is bitwise
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn text_import_rejects_corruption() {
        let space = cardinality_space(6, 3).unwrap();
        let ts = sample_training_set(&space, 0.3, 5).unwrap();
        let text = ts.to_text();

        let wrong_version = text.replacen("\"version\":1", "\"version\":3", 1);
        assert!(matches!(
            TrainingSet::from_text(&wrong_version),
            Err(Error::UnsupportedVersion { .. })
        ));

        let mut lines: Vec<&str> = text.lines().collect();
        let dropped = lines.remove(1);
        let missing = lines.join("\n");
        assert!(TrainingSet::from_text(&missing).is_err());

        let duplicated = format!("{}\n{}", text.trim_end(), dropped);
        let _ = duplicated; // header count now disagrees as well
        assert!(TrainingSet::from_text(&duplicated).is_err());

        assert!(TrainingSet::from_text("").is_err());
    }

    #[test]
    fn from_parts_rejects_invalid_members() {
        let bad = TrainingSet::from_parts(
            4,
            DatasetKind::Evens,
            0.2,
            0,
            0.0,
            vec![bits("0001")],
            vec![1.0],
        );
        assert!(matches!(bad, Err(Error::MalformedDocument { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn reweight_normalizes_for_any_beta(beta in 0.0..50.0f64, seed in 0u64..500) {
            let space = cardinality_space(10, 4).unwrap();
            let ts = sample_training_set(&space, 0.1, seed).unwrap();
            let rw = reweight_softmax(&ts, separation_cost, beta).unwrap();
            prop_assert!((rw.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(rw.weights().iter().all(|w| w.is_finite() && *w >= 0.0));
        }

        #[test]
        fn lower_cost_gets_strictly_larger_weight(seed in 0u64..500, beta in 0.01..10.0f64) {
            let space = evens_space(10).unwrap();
            let ts = sample_training_set(&space, 0.15, seed).unwrap();
            let rw = reweight_softmax(&ts, separation_cost, beta).unwrap();
            for i in 0..rw.len() {
                for j in 0..rw.len() {
                    let (ci, cj) = (separation_cost(rw.samples()[i]), separation_cost(rw.samples()[j]));
                    if ci < cj {
                        prop_assert!(rw.weights()[i] > rw.weights()[j]);
                    }
                }
            }
        }

        #[test]
        fn sampled_sets_round_trip_through_text(seed in 0u64..200) {
            let space = cardinality_space(8, 3).unwrap();
            let ts = sample_training_set(&space, 0.25, seed).unwrap();
            prop_assert_eq!(TrainingSet::from_text(&ts.to_text()).unwrap(), ts);
        }
    }
}
