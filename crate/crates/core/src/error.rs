use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid clone spec: {0}")]
    InvalidSpec(String),

    #[error("register must contain at least one qubit")]
    EmptyRegister,

    #[error("amplitude array has length {got}, expected {expected}")]
    BadLength { expected: usize, got: usize },

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("qubit index {index} out of range for {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("qubit {0} listed more than once")]
    DuplicateQubit(usize),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("state preparation target is all zero")]
    ZeroTarget,

    #[error("invalid basis layout: {0}")]
    InvalidLayout(String),

    #[error(
        "spec ({n}, {m}) violates the basis-count condition ({lhs} > {rhs}); \
         the auxiliary-qubit variant is required"
    )]
    Infeasible { n: u32, m: u32, lhs: String, rhs: String },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("no free basis available to break a permutation cycle")]
    NoFreeBasis,

    #[error("plan replay failed at move {index}: {reason}")]
    InvalidPlan { index: usize, reason: String },

    #[error("internal consistency error: {0}")]
    Inconsistent(String),

    #[error("circuit roles do not match spec: {0}")]
    RoleMismatch(String),

    #[error("unknown species '{name}' (available: {available})")]
    UnknownSpecies { name: String, available: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
