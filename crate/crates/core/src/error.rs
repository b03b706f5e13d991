use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit {qubit} out of range for {qubits} qubits")]
    QubitOutOfRange { qubit: usize, qubits: usize },
    #[error("qubit {0} used twice in one gate")]
    DuplicateQubit(usize),
    #[error("oracle `{name}` expects {expected} {side} bits, register has {actual}")]
    OracleWidth {
        name: String,
        side: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("oracle `{0}` is malformed: {1}")]
    MalformedOracle(String, String),
    #[error("not a permutation of {0} basis states")]
    InvalidPermutation(usize),
    #[error("state has {qubits} qubits, gate or program expects {expected}")]
    QubitCountMismatch { qubits: usize, expected: usize },
    #[error("{qubits} qubits exceeds the {what} cap of {cap}")]
    DimensionCap {
        what: &'static str,
        qubits: usize,
        cap: usize,
    },
    #[error("state not normalized: squared norm {0}")]
    NotNormalized(f64),
    #[error("amplitude vector length {0} is not a power of two")]
    BadLength(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("max flow {value} falls short of total mass {expected}")]
    FlowDeficit { value: f64, expected: f64 },
    #[error(
        "matrix scaling did not converge in {iterations} iterations (marginal error {error:e})"
    )]
    ScalingDiverged { iterations: usize, error: f64 },
    #[error("non-finite amplitude encountered at slice {0}")]
    NonFinite(usize),
    #[error("checkpoint at slice {slice} but program has {slices} slices")]
    InvalidCheckpoint { slice: usize, slices: usize },
    #[error("history carries no checkpoint annotations")]
    MissingCheckpoints,
    #[error("juggling needs at least 2 qubits, got {0}")]
    JuggleTooSmall(usize),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
