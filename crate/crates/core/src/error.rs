use thiserror::Error;

/// Errors raised anywhere in the graph and specification machinery.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed graph: {0}")]
    MalformedGraph(String),
    #[error("malformed morphism: {0}")]
    MalformedMorphism(String),
    #[error("endpoint mismatch: codomain of the first morphism is not the domain of the second")]
    EndpointMismatch,
    #[error("span legs do not share a domain")]
    SpanMismatch,
    #[error("cospan legs do not share a codomain")]
    CospanMismatch,
    #[error("label clash while gluing: {0}")]
    LabelClash(String),
    #[error("gluing conflict: {0}")]
    GluingConflict(String),
    #[error("square does not commute")]
    NonCommuting,
    #[error("squares are not composable: they do not share the middle edge")]
    NonComposable,
    #[error("pasting law violated: second square {second}, composite {composite}")]
    PastingViolation { second: bool, composite: bool },
    #[error("dangling condition violated: edge {edge} is incident to deleted node {node}")]
    DanglingViolation { node: String, edge: String },
    #[error("identification condition violated: {deleted} is identified with {other}")]
    IdentificationViolation { deleted: String, other: String },
    #[error("unsupported match: {0}")]
    UnsupportedMatch(String),
    #[error("malformed specification: {0}")]
    MalformedSpec(String),
    #[error("ill-sorted: {0}")]
    IllSorted(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("model does not satisfy the specification: {0}")]
    ModelDoesNotSatisfySpec(String),
    #[error("sort mismatch for shared name `{0}`")]
    SortMismatch(String),
    #[error("denominator is not a pleomorphism: {0}")]
    DenominatorNotPleo(String),
    #[error("denominator pleomorphism is unknown at this depth (use an explicit override): {0}")]
    DenominatorUnknown(String),
    #[error("pleomorphism verification failed for {morphism}: {reason}")]
    PleoVerificationFailed { morphism: String, reason: String },
    #[error("left square of the pleopushout does not commute")]
    LeftSquareNotCommuting,
    #[error("witness leg is not a verified pleomorphism: {0}")]
    WitnessNotPleo(String),
    #[error("cube check failed: {0}")]
    CubeCheckFailed(String),
    #[error("rule `{0}` has no generating span")]
    MissingSpan(String),
    #[error("instance mismatch: {0}")]
    InstanceMismatch(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
