use thiserror::Error;

/// Errors produced by the `ndeb-core` library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid slot selection {slots:?} for a {count}-slot system")]
    InvalidSlots { slots: Vec<usize>, count: usize },

    #[error("Bell index out of range: ({m}, {n}) for N = {dim}")]
    BellIndexOutOfRange { m: usize, n: usize, dim: usize },

    #[error("overlap requires both Bell indices to share a variant")]
    VariantMismatch,

    #[error("invalid clone parameters: {0}")]
    InvalidParams(String),

    #[error("amplitude matrix is not normalized (sum |a|^2 = {0})")]
    NotNormalized(f64),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("conditional undefined: branch {branch} has zero probability")]
    ZeroBranch { branch: usize },

    #[error("basis index {0} out of range 0..=3")]
    InvalidBasisIndex(usize),

    #[error("fidelity {fidelity} infeasible for N = {dim} (need 1/N <= F <= 1)")]
    InfeasibleFidelity { fidelity: f64, dim: usize },

    #[error("root not bracketed on [{lo}, {hi}]: g(lo) = {g_lo:.3e}, g(hi) = {g_hi:.3e}")]
    BracketFailure { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no sifted rounds available")]
    EmptySift,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
