use alloc::string::String;

/// Errors raised by the simulation core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator entry ({row}, {col}) out of range for dimension {dim}")]
    IndexOutOfRange { row: usize, col: usize, dim: usize },

    #[error("basis truncation N_max = {n_max} is too small (need at least {required})")]
    TruncationTooSmall { n_max: u32, required: u32 },

    #[error("integration failed at t = {time}: {reason}")]
    Numerical { time: f64, reason: &'static str },

    #[error("no jump channel has support at t = {time} (norm {norm})")]
    DegenerateJump { time: f64, norm: f64 },

    #[error("empty time grid")]
    EmptyGrid,

    #[error("no coincidence support (post-selected weight {weight:e})")]
    NoCoincidenceSupport { weight: f64 },

    #[error("couplings still active at read-out time t = {time} (g1 = {g1:e}, g2 = {g2:e})")]
    CouplingsActive { time: f64, g1: f64, g2: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
