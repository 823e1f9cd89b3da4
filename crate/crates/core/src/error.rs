use thiserror::Error;

/// Group axiom that a multiplication table failed to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    Closure,
    Identity,
    Inverse,
    Associativity,
}

impl std::fmt::Display for Axiom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Axiom::Closure => "closure",
            Axiom::Identity => "identity",
            Axiom::Inverse => "inverse",
            Axiom::Associativity => "associativity",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group order {0}: must be at least 1")]
    InvalidOrder(usize),

    #[error("not a group: {axiom} fails at witness {witness:?}")]
    NotAGroup { axiom: Axiom, witness: (u32, u32, u32) },

    #[error("malformed multiplication table: {0}")]
    MalformedTable(String),

    #[error("capacity exceeded: projected {projected} exceeds limit {limit}")]
    Capacity { projected: u128, limit: usize },

    #[error("incompatible operands: {0}")]
    IncompatibleOperands(&'static str),

    #[error("invalid vertex: {0}")]
    InvalidVertex(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
