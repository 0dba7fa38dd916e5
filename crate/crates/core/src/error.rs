use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid poset: {0}")]
    InvalidPoset(String),
    #[error("the comparability graph is disconnected")]
    DisconnectedPoset,
    #[error("malformed loop: {0}")]
    MalformedLoop(String),
    #[error("relator {relator} evaluates to {value} instead of 1")]
    RelatorViolation { relator: usize, value: String },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("morphism is not invertible")]
    NotInvertible,
    #[error("restriction to an empty set of elements")]
    EmptyRestriction,
    #[error("net is not a net bundle: inclusion {0} is not an automorphism")]
    NotABundle(String),
    #[error("transport around relator {relator} is not the identity (residual {residual:.3e})")]
    RelatorNotFlat { relator: usize, residual: f64 },
    #[error("unsupported group: {0}")]
    UnsupportedGroup(String),
    #[error("sub-poset is not downward directed: {0}")]
    NotDownwardDirected(String),
    #[error("universal fiber at point `{0}` has no numeric realization")]
    FiberNotRealizable(String),
    #[error("point function is not supported in chart `{0}`")]
    SupportViolation(String),
    #[error("inconsistent heteromorphism: {0}")]
    InconsistentHeteromorphism(String),
    #[error("competitor differs from the lift on generator {generator} (residual {residual:.3e})")]
    CompetitorRejected { generator: usize, residual: f64 },
    #[error("not a section: {0}")]
    NotASection(String),
    #[error("poset has no maximum")]
    NotDirected,
    #[error("no refinement witness for overlapping charts `{0}` and `{1}`")]
    NoRefinementWitness(String, String),
    #[error("symbol vanishes on the unit circle (root modulus {0})")]
    SymbolVanishesOnCircle(f64),
    #[error("kernel not invariant under transport on {0}")]
    KernelNotInvariant(String),
    #[error("index is not constant: {0}")]
    NonConstantIndex(String),
    #[error("invalid sector: {0}")]
    InvalidSector(String),
}
