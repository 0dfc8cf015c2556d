use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {0} outside the supported range 1..=20")]
    QubitCountOutOfRange(usize),

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitIndexOutOfRange { index: usize, n_qubits: usize },

    #[error("two-qubit gate requires distinct qubits, got {0} twice")]
    IdenticalQubits(usize),

    #[error("layer count must be a positive even integer, got {0}")]
    InvalidLayerCount(usize),

    #[error("parameter vector has length {got}, circuit expects {expected}")]
    ParamCountMismatch { expected: usize, got: usize },

    #[error("bit width {0} outside the supported range 1..=32")]
    InvalidBitWidth(usize),

    #[error("value {value} does not fit in {width} bits")]
    ValueOutOfRange { value: u64, width: usize },

    #[error("cannot parse {0:?} as a bitstring")]
    MalformedBitstring(String),

    #[error("solution space for {0} has fewer than two members")]
    DegenerateSpace(String),

    #[error("cardinality k={k} out of range for {n_bits} bits")]
    CardinalityOutOfRange { n_bits: usize, k: usize },

    #[error("training fraction must lie strictly between 0 and 1, got {0}")]
    TrainingFractionOutOfRange(f64),

    #[error("training fraction {epsilon} of {space_size} members leaves no room for generalization (D = {d})")]
    DegenerateTrainingSize {
        epsilon: f64,
        space_size: usize,
        d: usize,
    },

    #[error("inverse temperature must be non-negative, got {0}")]
    NegativeBeta(f64),

    #[error("training-set costs have zero spread, temperature undefined")]
    ZeroCostSpread,

    #[error("training set needs at least two samples for a temperature, got {0}")]
    TooFewSamples(usize),

    #[error("bit width mismatch: {left} vs {right}")]
    WidthMismatch { left: usize, right: usize },

    #[error("query batch is empty")]
    EmptyBatch,

    #[error("no report has a defined fidelity, median run undefined")]
    MedianUndefined,

    #[error("invalid trainer configuration: {0}")]
    InvalidTrainerConfig(String),

    #[error("unsupported document version {got}, expected {expected}")]
    UnsupportedVersion { expected: u32, got: u32 },

    #[error("malformed {kind} document: {detail}")]
    MalformedDocument { kind: &'static str, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
