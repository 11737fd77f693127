use thiserror::Error;

use crate::symbols::PrecisionTie;

#[derive(Debug, Error)]
pub enum Error {
    #[error("bad rational literal {0:?}")]
    BadRational(String),
    #[error("bad basis: {0}")]
    BadBasis(String),
    #[error("series are over different bases")]
    BasisMismatch,
    #[error("truncation bound {requested} exceeds available bound {available}")]
    BadBound { requested: String, available: String },
    #[error("horizon too short; maximal safe horizon is {max}")]
    HorizonTooShort { max: String },
    #[error("polynomial depends explicitly on x; eliminate x first")]
    ExplicitX,
    #[error("resultant vanished identically: F and dF/dx share a factor")]
    ResultantVanished,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("partial derivative with respect to {0} vanishes up to the horizon")]
    PartialVanishes(String),
    #[error("series does not formally satisfy the equation: {0}")]
    NotSatisfied(String),
    #[error("verification failed at index {0}")]
    VerificationFailed(usize),
    #[error(transparent)]
    PrecisionTie(#[from] PrecisionTie),
    #[error("{0} is not in the lattice")]
    NotInLattice(String),
    #[error("scalar {0} is zero")]
    ZeroScalar(usize),
    #[error("rescale invariance violated: {0}")]
    InvarianceViolated(String),
    #[error("difference terms have no s=0 analogue")]
    ShiftPresent,
    #[error("coefficient {0:?} has no supported family tag")]
    UnknownFamily(String),
    #[error("gap rule found only {found} nonzero positions")]
    InsufficientNonzeroTerms { found: usize },
    #[error("no equation found within weight {0}")]
    NotFoundWithinW(u32),
    #[error("syntax error at {line}:{col}: {msg}")]
    SyntaxError { line: usize, col: usize, msg: String },
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("schema error: {0}")]
    SchemaError(String),
    #[error("index {0} exceeds the factoring limit")]
    FactorLimitExceeded(u64),
    #[error("bad configuration: {0}")]
    BadConfig(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::BadRational(_) => "E_BAD_RATIONAL",
            Error::BadBasis(_) => "E_BAD_BASIS",
            Error::BasisMismatch => "E_BASIS_MISMATCH",
            Error::BadBound { .. } => "E_BAD_BOUND",
            Error::HorizonTooShort { .. } => "E_HORIZON_TOO_SHORT",
            Error::ExplicitX => "E_EXPLICIT_X",
            Error::ResultantVanished => "E_RESULTANT_VANISHED",
            Error::DegenerateInput(_) => "E_DEGENERATE_INPUT",
            Error::PartialVanishes(_) => "E_PARTIAL_VANISHES",
            Error::NotSatisfied(_) => "E_NOT_SATISFIED",
            Error::VerificationFailed(_) => "E_VERIFICATION_FAILED",
            Error::PrecisionTie(_) => "E_PRECISION_TIE",
            Error::NotInLattice(_) => "E_NOT_IN_LATTICE",
            Error::ZeroScalar(_) => "E_ZERO_SCALAR",
            Error::InvarianceViolated(_) => "E_INVARIANCE_VIOLATED",
            Error::ShiftPresent => "E_SHIFT_PRESENT",
            Error::UnknownFamily(_) => "E_UNKNOWN_FAMILY",
            Error::InsufficientNonzeroTerms { .. } => "E_INSUFFICIENT_NONZERO_TERMS",
            Error::NotFoundWithinW(_) => "E_NOT_FOUND_WITHIN_W",
            Error::SyntaxError { .. } => "E_SYNTAX",
            Error::UnknownSymbol(_) => "E_UNKNOWN_SYMBOL",
            Error::SchemaError(_) => "E_SCHEMA",
            Error::FactorLimitExceeded(_) => "E_FACTOR_LIMIT",
            Error::BadConfig(_) => "E_CONFIG",
            Error::Io(_) => "E_IO",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
