use thiserror::Error;

/// Errors raised by the simulator, the spectral routines and the experiment harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operator is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("generator is not traceless (|trace| = {trace:.3e})")]
    NotTraceless { trace: f64 },

    #[error("operator is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("index {index} out of range (valid range 0..{len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("{what} = {value} is out of range")]
    OutOfRange { what: &'static str, value: f64 },

    #[error("{n_qubits} qubits exceeds the materialization cap of {max}")]
    TooLarge { n_qubits: usize, max: usize },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("operator does not preserve the subspace (leakage {deviation:.3e})")]
    NotInvariant { deviation: f64 },

    #[error("Lie closure exceeded cap {cap} (partial dimension {partial_dim})")]
    CapExceeded { partial_dim: usize, cap: usize },

    #[error("all outcome probabilities are below the cutoff")]
    DegenerateDistribution,

    #[error("spectral decomposition failed: {0}")]
    SpectralFailure(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
