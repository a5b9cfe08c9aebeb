use thiserror::Error;

/// Errors surfaced by the library. The CLI maps these onto exit codes, so
/// variants are grouped by how the caller is expected to react.
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero field element")]
    DivisionByZero,

    #[error("conductor mismatch: {0} and {1} have no common embedding here")]
    ConductorMismatch(u32, u32),

    #[error("operation requires a real field element, got {0}")]
    NonRealElement(String),

    #[error("sign determination exhausted {0} bits of precision on a nonzero element")]
    PrecisionExhausted(u32),

    #[error("cannot parse field element: {0}")]
    ParseFieldElement(String),

    #[error("generator {index} is not orthogonal")]
    NonOrthogonalGenerator { index: usize },

    #[error("orbit closure exceeded cap of {cap} points; group may be infinite or misspecified")]
    OrbitCapExceeded { cap: usize },

    #[error("generator {index} does not act as a signed permutation of the cluster")]
    NotSignedPermutation { index: usize },

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("strip test margin {margin:e} for m={m:?} is within epsilon of the window boundary; rerun with a different shift seed")]
    BoundaryAmbiguous { m: Vec<i64>, margin: f64 },

    #[error("enumeration exceeded the node limit of {limit}")]
    NodeLimitExceeded { limit: u64 },

    #[error("naive scan box of ~{estimate} candidates exceeds the cap of {cap}")]
    ScanTooLarge { estimate: u128, cap: u128 },

    #[error("bad configuration: {0}")]
    BadConfig(String),

    #[error("unknown preset: {0}")]
    UnknownPreset(String),

    #[error("degenerate patch: {0}")]
    DegeneratePatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("config hash mismatch: patch was generated from a different configuration")]
    ConfigHashMismatch,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
