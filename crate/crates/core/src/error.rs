use thiserror::Error;

/// Errors raised by constructions whose preconditions fail.
///
/// Law violations found by the `validate_*` functions are reported as
/// [`Violation`](crate::Violation) lists instead; this type is for inputs a
/// construction cannot proceed with.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("presheaves live over different base posets")]
    BaseMismatch,

    #[error("maps do not share a common codomain")]
    CodomainMismatch,

    #[error("poset relation is not antisymmetric: {0} <= {1} and {1} <= {0}")]
    NotAntisymmetric(String, String),

    #[error("unknown label `{label}` in {context}")]
    UnknownLabel { label: String, context: String },

    #[error("duplicate label `{label}` in {context}")]
    DuplicateLabel { label: String, context: String },

    #[error("malformed data: {0}")]
    Malformed(String),

    #[error("component `{0}` of the family is empty")]
    EmptyComponent(String),

    #[error("component `{0}` is not connected")]
    Disconnected(String),

    #[error("cover component `{0}` is not represented in the span class")]
    MissingCoverComponent(String),

    #[error("span class is not closed: {0}")]
    ClosureViolation(String),

    #[error("condition G fails at 1-simplex `{0}`")]
    ConditionG(String),

    #[error("validation failed: {0}")]
    Invalid(String),

    #[error("family {{sigma_l}} does not factor through the cover: {0}")]
    IncompatibleFamily(String),

    #[error("word endpoints differ")]
    EndpointMismatch,

    #[error("element outside the carrier of the word's base object")]
    DomainMismatch,

    #[error("not a covering projection: {0}")]
    NotCoveringProjection(String),

    #[error("relation not preserved: {0}")]
    RelationNotPreserved(String),

    #[error("enumeration limit exceeded: {0}")]
    LimitExceeded(String),

    #[error("{0}")]
    Parse(String),

    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// One failed law, reported as data.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Violation {
    pub law: String,
    pub detail: String,
}

impl Violation {
    pub fn new(law: impl Into<String>, detail: impl Into<String>) -> Self {
        Violation { law: law.into(), detail: detail.into() }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.law, self.detail)
    }
}
