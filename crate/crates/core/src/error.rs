use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed diagram: {0}")]
    MalformedDiagram(String),

    #[error("rule {rule} not applicable: {reason}")]
    RuleNotApplicable { rule: &'static str, reason: String },

    #[error("derivation step {index} failed: {source}")]
    DerivationStep {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("derivation step {index} changed the linear map (deviation {deviation:.3e})")]
    UnsoundStep { index: usize, deviation: f64 },

    #[error("resource limit exceeded for {what}: limit {limit}, requested {requested}")]
    ResourceLimit {
        what: &'static str,
        limit: usize,
        requested: usize,
    },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("compiler state: {0}")]
    CompilerState(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn not_applicable(rule: &'static str, reason: impl Into<String>) -> Self {
        Error::RuleNotApplicable {
            rule,
            reason: reason.into(),
        }
    }

    pub(crate) fn limit(what: &'static str, limit: usize, requested: usize) -> Self {
        Error::ResourceLimit {
            what,
            limit,
            requested,
        }
    }
}
