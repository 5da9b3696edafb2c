use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field exponent must be at least 1, got {0}")]
    BadExponent(u32),
    #[error("field order {p}^{alpha} exceeds the supported maximum {max}")]
    FieldTooLarge { p: u64, alpha: u32, max: u64 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("subfield degree {degree} does not divide the field degree {alpha}")]
    BadSubfield { degree: u32, alpha: u32 },
    #[error("element index {index} is outside a field of order {q}")]
    ElementOutOfRange { index: u64, q: u64 },
    #[error("affine map x -> a*x + b needs a nonzero multiplier")]
    ZeroMultiplier,
    #[error("invalid subgroup descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("operation requires a descriptor with b = 0; conjugate first")]
    NeedsConjugation,
    #[error("selection is not a set of immediate supergroups: {0}")]
    BadSelection(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parameter tuple violates {condition}: {detail}")]
    InvalidClass { condition: &'static str, detail: String },
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("degenerate design: {0}")]
    DegenerateDesign(String),
    #[error("design check failed: {0}")]
    DesignCheck(String),
    #[error("Johnson bound not applicable: w^2 - n*w + n*delta = {0} is not positive")]
    JohnsonInapplicable(i128),
    #[error("no witness: {0}")]
    NoWitness(String),
}
