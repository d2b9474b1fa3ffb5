use thiserror::Error;

/// Every failure the library can report.
///
/// The variants are deliberately coarse: each one corresponds to a class of
/// mathematical obstruction or misuse that a caller (or the CLI) may want to
/// react to differently.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("type mismatch: {0}")]
    TypeMismatch(String),

    #[error("not invertible: {0}")]
    NotInvertible(String),

    /// A division by a non-unit of Z/p^m was required. `scalar` is the
    /// offending value, `context` says which stage needed it.
    #[error("denominator {scalar} is not invertible ({context})")]
    DenominatorNotInvertible { scalar: String, context: String },

    #[error("integrality violation in Witt polynomial {name}_{index} for p = {p}")]
    IntegralityViolation { p: u64, name: char, index: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("not quasi-homogeneous: {0}")]
    NotQuasiHomogeneous(String),

    #[error("not an isolated singularity: {0}")]
    NotIsolated(String),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("precision loss: {0}")]
    PrecisionLoss(String),

    #[error("inverse system violation: {0}")]
    InverseSystemViolation(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::TypeMismatch(_) => "TypeMismatch",
            Error::NotInvertible(_) => "NotInvertible",
            Error::DenominatorNotInvertible { .. } => "DenominatorNotInvertible",
            Error::IntegralityViolation { .. } => "IntegralityViolation",
            Error::Unsupported(_) => "Unsupported",
            Error::NotQuasiHomogeneous(_) => "NotQuasiHomogeneous",
            Error::NotIsolated(_) => "NotIsolated",
            Error::InternalInconsistency(_) => "InternalInconsistency",
            Error::PrecisionLoss(_) => "PrecisionLoss",
            Error::InverseSystemViolation(_) => "InverseSystemViolation",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
