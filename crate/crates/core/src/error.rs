use thiserror::Error;

/// Problems with the shape of a structure, independent of where it came from.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("arity mismatch for `{symbol}`: expected {expected}, found {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("unknown relation symbol `{0}`")]
    UnknownSymbol(String),
    #[error("duplicate relation symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("duplicate relation line for `{0}`")]
    DuplicateRelation(String),
    #[error("relation symbol `{0}` must have arity >= 1")]
    ZeroArity(String),
    #[error("invalid token `{0}`")]
    BadToken(String),
    #[error("universe must be nonempty")]
    EmptyUniverse,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Parse { line: usize, source: StructureError },
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("signature mismatch")]
    SignatureMismatch,
    #[error("element set is not contained in the universe: `{0}`")]
    NotInUniverse(String),
    #[error("element set must be nonempty")]
    EmptySet,
    #[error("`{dominator}` does not dominate `{removed}`")]
    NotDominated { removed: String, dominator: String },
    #[error("{what}: cap of {cap} exceeded (reached {reached})")]
    CapExceeded {
        what: &'static str,
        cap: usize,
        reached: usize,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal validation failed: {0}")]
    Validation(String),
    #[error("partition function is zero")]
    ZeroPartition,
    #[error("no witness exists: {0}")]
    NoWitness(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
