use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("particle count {count} out of range for {modes} modes")]
    CountOutOfRange { count: usize, modes: usize },

    #[error("orbital index {index} outside a {n_qubits}-qubit register")]
    IndexOutOfRange { index: usize, n_qubits: usize },

    #[error("register mismatch: expected {expected} qubits, got {actual}")]
    RegisterMismatch { expected: usize, actual: usize },

    #[error("operator is not Hermitian: {0}")]
    NotHermitian(String),

    #[error("pool generator needs four distinct orbitals, got {0:?}")]
    RepeatedOrbitals([usize; 4]),

    #[error("hopping generator fails h^3 = h (residual {0:.3e})")]
    NotHoppingGenerator(f64),

    #[error("operator is not diagonal in the computational basis")]
    NotDiagonal,

    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("operator leaks out of the ({n_up}, {n_down}) sector")]
    SectorViolation { n_up: usize, n_down: usize },

    #[error("operator has complex matrix elements in the sector; only real operators are supported")]
    ComplexMatrix,

    #[error("eigensolver did not converge after {iterations} restarts (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("reference state is degenerate (gap {0:.3e}); non-degenerate perturbation theory does not apply")]
    DegenerateReference(f64),

    #[error("reference state is not an eigenstate of h0 (residual {0:.3e})")]
    NotEigenstate(f64),

    #[error("weak-coupling assignment undefined: |g/eps| = {ratio:.4} > 1 for {label}")]
    WeakCouplingViolated { label: String, ratio: f64 },

    #[error("non-finite energy at optimizer step {step}")]
    NonFiniteEnergy { step: usize },

    #[error("invalid configuration at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("{0}")]
    Invalid(String),

    #[error("artifact mismatch: {0}")]
    ArtifactMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
