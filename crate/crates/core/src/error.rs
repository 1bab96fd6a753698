use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("tabulated map queried off-grid at t = {0}")]
    OffGrid(f64),

    #[error("time derivative unavailable for this map family")]
    DerivativeUnavailable,

    #[error("operator is not Hermitian (max |A - A^H| = {0:e})")]
    NonHermitian(f64),

    #[error("Kraus set is incomplete (max |sum K^H K - I| = {0:e})")]
    IncompleteKraus(f64),

    #[error("singular implicit system at step {0}")]
    SingularSystem(usize),

    #[error("channel is not a Pauli channel")]
    NonPauliChannel,

    #[error("map is not of diagonal-plus-corner form")]
    NotDiagonalPlusCorner,
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Self::InvalidParameter { name, reason: reason.into() }
    }
}
