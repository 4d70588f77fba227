use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors for operations whose preconditions can fail structurally.
///
/// Axiom-level problems (a composition table that is not associative, a map that
/// is not a homomorphism) are reported through [`crate::report::ValidationReport`]
/// instead, so that a single call can surface every violation with witnesses.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown identifier `{id}` ({kind})")]
    UnknownId { kind: &'static str, id: String },

    #[error("duplicate identifier `{id}` ({kind})")]
    DuplicateId { kind: &'static str, id: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("operation requires finite fibers: {0}")]
    InfiniteFiber(String),

    #[error("search aborted: node cap {cap} exceeded")]
    SearchCapExceeded { cap: u64 },

    #[error("numerical decomposition failed: {0}")]
    Numerical(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),
}
