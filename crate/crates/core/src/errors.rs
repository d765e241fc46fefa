//! Error types shared across the library.

use thiserror::Error;

/// Certificate attached to a reducibility detection: which approximant stage
/// exposed the splitting and what the residual data looked like.
#[derive(Debug, Clone)]
pub struct IrredCert {
    pub stage: usize,
    pub detail: String,
}

impl std::fmt::Display for IrredCert {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "stage {}: {}", self.stage, self.detail)
    }
}

#[derive(Debug, Clone, Error)]
pub enum MclError {
    #[error("negative valuation")]
    NegativeValuation,
    #[error("division by zero polynomial")]
    DivisionByZeroPoly,
    #[error("factorization over Q capped at degree 4, got {0}")]
    DegreeTooLargeOverQ(u64),
    #[error("integer factor search exceeded its bound")]
    FactorSearchExceeded,
    #[error("not locally irreducible ({0})")]
    NotIrreducible(IrredCert),
    #[error("polynomial is not a key for the valuation: {0}")]
    InvalidKey(String),
    #[error("key value must exceed the current value")]
    KeyValueTooSmall,
    #[error("infinite value where a finite one is required")]
    InfiniteValue,
    #[error("element is not a unit")]
    NotAUnit,
    #[error("primitive element search exhausted")]
    PrimitiveSearchExhausted,
    #[error("purely inseparable over the completion; no finite minimal disk")]
    PurelyInseparableLocal,
    #[error("residue characteristic is zero; use the rational-center construction")]
    ResidueCharZero,
    #[error("no certified candidate found: {0}")]
    NoCertifiedCandidate(String),
    #[error("roots are not equispaced")]
    NotEquispaced,
    #[error("singular model (discriminant is zero)")]
    SingularModel,
    #[error("model coefficients are not integral")]
    NonIntegralModel,
    #[error("three-division classification unavailable in residue characteristic 3")]
    ResidueCharThree,
    #[error("impossible root-multiplicity pattern; internal consistency violated")]
    PatternViolation,
    #[error("curve does not have potential multiplicative reduction")]
    NotPotentialMultiplicative,
    #[error("forms are not coprime")]
    NotCoprime,
    #[error("forms have mismatched degrees")]
    DegreeMismatch,
    #[error("search budget exceeded: {0}")]
    SearchBudgetExceeded(String),
    #[error("unsupported residue field extension: {0}")]
    UnsupportedResidue(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, MclError>;
