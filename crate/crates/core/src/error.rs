use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("operator is not Hermitian (max |H - H^dagger| = {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("normalization violated: |a|^2 + |b|^2 - 1 = {defect:e}")]
    Normalization { defect: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("qubit position {position} out of range for a {n}-qubit register")]
    PositionOutOfRange { position: usize, n: usize },

    #[error("history enumeration over {steps} steps exceeds the limit of {limit}")]
    TooManyHistories { steps: usize, limit: usize },

    #[error("dilation factorization failed (residual {residual:e})")]
    FactorizationFailed { residual: f64 },

    #[error("invariant `{name}` violated (deviation {deviation:e})")]
    InvariantViolation { name: String, deviation: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn dims(expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
