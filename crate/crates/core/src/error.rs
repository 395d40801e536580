use thiserror::Error;

use crate::problems::bds::GraphError;
use crate::problems::cvp::CircuitError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed instance: {0}")]
    MalformedInstance(String),

    #[error("sample {index} is not a member of {language}")]
    NonMemberSample { index: usize, language: String },

    #[error("sample {index} is labelled {labelled} but the reference oracle says {actual}")]
    MislabeledSample {
        index: usize,
        labelled: &'static str,
        actual: &'static str,
    },

    #[error("ladder rung {rung} (size {size}) produced no instances")]
    GeneratorExhausted { rung: usize, size: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("middle factorizations disagree: {0}")]
    FactorizationMismatch(String),

    #[error("many-one map violated on sample {index}: x in L is {source_member}, h(x) in target is {target_member}")]
    InvalidManyOneMap {
        index: usize,
        source_member: bool,
        target_member: bool,
    },

    #[error("n = {n} exceeds the enumeration cap {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("unknown problem {0:?}")]
    UnknownProblem(String),

    #[error("unknown catalog entry {0:?}")]
    UnknownEntry(String),

    #[error("unknown preposition {0:?}")]
    UnknownPreposition(String),

    #[error(transparent)]
    Graph(#[from] GraphError),

    #[error(transparent)]
    Circuit(#[from] CircuitError),

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn malformed(reason: impl Into<String>) -> Self {
        Error::MalformedInstance(reason.into())
    }
}
