//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised by field arithmetic, parsing and place bookkeeping.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("zero input where a nonzero field element is required")]
    ZeroInput,
    #[error("characteristic mismatch: {0} vs {1}")]
    CharacteristicMismatch(u64, u64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("{0} is not irreducible")]
    NotIrreducible(String),
    #[error("factorization beyond desk-scale budget: {0}")]
    FactorBudget(String),
    #[error("wrong field context: {0}")]
    WrongContext(String),
}

/// Errors raised by the dynamical engines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    /// A coordinate exceeded the digit or degree budget.
    #[error("overflow guard: {0}")]
    Overflow(String),
    #[error("window budget exceeded: {0}")]
    WindowBudget(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("zero polynomial has no valuation")]
    ZeroPolynomial,
    #[error("map is not loxodromic")]
    NotLoxodromic,
    #[error("cone exit: weight left the open positive quadrant")]
    ConeExit,
    #[error("iota undefined: the start point is periodic inside the scanned window")]
    IotaUndefined,
    #[error("dynamical degrees are incompatible")]
    IncompatibleDegrees,
    #[error("vanishing leading coefficient at this place")]
    VanishingLeadingCoefficient,
    #[error("word cannot be normalized by the implemented absorption rules")]
    NotReduced,
    #[error("maps are not over the same surface and field")]
    MixedSystems,
    #[error("vanishing undecided at the current budget: {0}")]
    Undecided(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}
