use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("`bot` is a reserved symbol")]
    ReservedSymbol,
    #[error("signature already has a bottom element")]
    AlreadyStrict,
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("symbol `{symbol}` has arity {expected} but was given {found} children")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("signature mismatch")]
    SignatureMismatch,
    #[error("node index {0} out of range")]
    NodeOutOfRange(usize),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("`{0}` is used both as a variable and as a parameter")]
    NameClash(String),
    #[error("right-hand side of `{0}` is a tree rooted at a variable leaf")]
    UnguardedTree(String),
    #[error("system is not ideal; unguarded variables: {}", .0.join(", "))]
    NotIdeal(Vec<String>),
    #[error("leaf `{0}` has no substitution")]
    DanglingLeaf(String),
    #[error("chain level {level} is infinite for this signature")]
    InfiniteChain { level: usize },
    #[error("system is not flat: `{0}`")]
    NotFlat(String),
    #[error("wrong signature shape: {0}")]
    SignatureShape(String),
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("map is not a homomorphism")]
    NotHomomorphism,
    #[error("solutions are not unique in the {0} algebra")]
    NonUniqueSolutions(&'static str),
    #[error("coalgebra homomorphism square fails at `{0}`")]
    SquareViolated(String),
    #[error("variable map is not surjective")]
    NotSurjective,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
