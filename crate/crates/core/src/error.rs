use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Structural errors raised by the engine. A structural error is distinct from a
/// negative verdict: a morphism that fails to preserve an edge yields `Ok(false)`,
/// while a map that is not even total yields an `Err`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("unknown relation symbol `{0}`")]
    UnknownSymbol(String),

    #[error("duplicate relation symbol `{0}`")]
    DuplicateSymbol(String),

    #[error("symbol `{symbol}` has arity {expected} but was given {found} arguments")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },

    #[error("relation symbols must have arity at least 1 (`{0}`)")]
    ZeroArity(String),

    #[error("order pair `{0}` <= `{1}` relates symbols of different arities")]
    CrossArityOrder(String, String),

    #[error("unknown element `{0}`")]
    UnknownElement(String),

    #[error("duplicate element `{0}`")]
    DuplicateElement(String),

    #[error("map is not total: no image for `{0}`")]
    NonTotalMap(String),

    #[error("morphisms do not share a codomain")]
    CodomainMismatch,

    #[error("morphisms are not parallel")]
    NotParallel,

    #[error("morphisms are not composable")]
    NotComposable,

    #[error("element `{0}` is not in the codomain")]
    NotInCodomain(String),

    #[error("theory `{0}` is not reflexive")]
    NotReflexive(String),

    #[error("theory `{0}` is not a schematic extension of its base theory")]
    NotSchematic(String),

    #[error("the signature order is not discrete")]
    NotDiscrete,

    #[error("the signature is not a complete Heyting algebra: {0}")]
    NotHeyting(String),

    #[error("not a lattice: {0}")]
    NotLattice(String),

    #[error("axiom has an equality conclusion: {0}")]
    EqualityConclusion(String),

    #[error("equality axiom `{0}` must have exactly the two equated variables in its premises")]
    BadEqualityAxiom(String),

    #[error("{what} is not a model of the theory")]
    NotModel { what: String },

    #[error("non-binary relation symbol `{0}`")]
    NonBinary(String),

    #[error("axiom has {found} variables; the safety search supports at most {limit}")]
    TooManyVariables { found: usize, limit: usize },

    #[error("invalid axiom schema: {0}")]
    InvalidSchema(String),

    #[error("invalid quantale: {0}")]
    InvalidQuantale(String),

    #[error("enumeration too large: {0}")]
    TooLarge(String),

    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("invalid document: {0}")]
    Document(String),
}
