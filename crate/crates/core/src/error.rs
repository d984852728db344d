use thiserror::Error;

/// Errors shared by every module of the crate.
///
/// Domain errors (bad inputs, exceeded budgets) are ordinary values a caller
/// may handle; `VerificationFailed` is different — it means a construction
/// that is proved to work did not survive its own re-check, i.e. a bug.
#[derive(Debug, Error)]
pub enum Error {
    #[error("a finite set must be nonempty")]
    EmptySet,
    #[error("element {0} exceeds the universe bound {1}")]
    UniverseExceeded(u64, u32),
    #[error("dilation factor must be positive")]
    ZeroDilation,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("generator list is empty")]
    EmptyGenerators,
    #[error("operation is undefined for the trivial monoid {{0}}")]
    TrivialMonoid,
    #[error("operation requires gcd-1 data: {0}")]
    NotNumerical(String),
    #[error("{0} lies outside the ambient monoid")]
    OutsideAmbient(String),
    #[error("the identity {{0}} is not a valid input here")]
    IdentityInput,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("enumeration budget exhausted after {limit} nodes; partial results are discarded, not truncated silently")]
    BudgetExhausted { limit: u64 },
    #[error("recursion depth {0} exceeds the allowed bound {1}")]
    DepthExceeded(u32, u32),
    #[error("bounded search ended without a verified witness: {0}")]
    SearchExhausted(String),
    #[error("internal verification failed (this is a bug): {0}")]
    VerificationFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
