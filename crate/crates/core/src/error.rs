use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("register of {0} qubits is outside the supported range 1..=8")]
    QubitCount(usize),
    #[error("amplitude vector of length {0} is not a power of two")]
    AmplitudeLength(usize),
    #[error("state norm {0} deviates from 1")]
    NotNormalized(f64),
    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitIndex { index: usize, n_qubits: usize },
    #[error("a two-qubit operation needs distinct qubits, got {0} twice")]
    SameQubit(usize),
    #[error("expected dimension {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("matrix is not Hermitian (deviation {0})")]
    NotHermitian(f64),
    #[error("trace {0} deviates from 1")]
    NonUnitTrace(f64),
    #[error("matrix has negative eigenvalue {0}")]
    NotPositive(f64),
    #[error("direction norm {0} deviates from 1")]
    NonUnitDirection(f64),
    #[error("ensemble is empty")]
    EmptyEnsemble,
    #[error("measurement branch with probability {0} cannot be renormalized")]
    DegenerateCollapse(f64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeviceError {
    #[error("two particles occupy one slot at t={slot}")]
    Collision { slot: usize },
    #[error("particle {particle} is never emitted")]
    Stuck { particle: usize },
    #[error(
        "no schedule of length {block_size} realizes {perm:?} with a loop delay of {loop_delay}"
    )]
    Unrealizable {
        perm: Vec<usize>,
        block_size: usize,
        loop_delay: usize,
    },
    #[error("schedule of length {got} does not fit a block of {expected}")]
    ScheduleLength { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("block has {got} elements, expected {expected}")]
    BlockLength { expected: usize, got: usize },
    #[error("{0:?} is not a permutation")]
    NotAPermutation(Vec<usize>),
    #[error("invalid permutation set: {0}")]
    PermutationSet(String),
    #[error("invalid control key: {0}")]
    ControlKey(String),
    #[error("group size must be at least 1")]
    GroupSize,
    #[error(transparent)]
    Device(#[from] DeviceError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("invalid session configuration: {0}")]
    Config(String),
    #[error("invalid eavesdropper strategy: {0}")]
    Strategy(String),
    #[error("only {got} sifted key bits survived, {needed} requested")]
    InsufficientSift { got: usize, needed: usize },
    #[error(
        "transcript was rejected by the eavesdropping check (error rate {rate} > {threshold})"
    )]
    Rejected { rate: f64, threshold: f64 },
    #[error("transcript has not been through an eavesdropping check")]
    Unchecked,
    #[error("transcript is empty")]
    EmptyTranscript,
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Core(#[from] CoreError),
}
