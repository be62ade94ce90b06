use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no binding for parameter {component}[{slot}]")]
    UnboundParameter { component: String, slot: usize },

    #[error("qubit {qubit} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("shot count must be at least 1")]
    ZeroShots,

    #[error("post-selection retained no shots")]
    EmptyRetention,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("expected 3 tokens (topology node edge), got {0}")]
    TokenCount(usize),

    #[error("unknown token `{0}`")]
    UnknownToken(String),

    #[error("token `{token}` is a {found}, expected a {expected} in this position")]
    RoleOrder {
        token: String,
        expected: &'static str,
        found: &'static str,
    },

    #[error("invalid vocabulary: {0}")]
    InvalidVocabulary(String),

    #[error("connector {connector} is not supported by the {model} model")]
    UnsupportedConnector {
        connector: &'static str,
        model: &'static str,
    },

    #[error("calibration needs at least 2 anchors, got {0}")]
    TooFewAnchors(usize),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("labeling failed: {0}")]
    Labeling(String),

    #[error("split sizes {requested} exceed record count {available}")]
    SplitTooLarge { requested: usize, available: usize },

    #[error("multiplicity must be a positive integer, got {0}")]
    InvalidMultiplicity(i64),

    #[error("multiplicity product overflows")]
    MultiplicityOverflow,

    #[error("cannot evaluate an empty split")]
    EmptySplit,

    #[error("non-finite loss at epoch {epoch} ({probe})")]
    NonFiniteLoss { epoch: usize, probe: &'static str },

    #[error("{0}")]
    Precondition(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
