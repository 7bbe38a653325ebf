use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed ternary code: {0}")]
    MalformedCode(String),
    #[error("invalid bit string: {0}")]
    InvalidBitString(String),
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("truncation depth {requested} exceeds tree height {height}")]
    DepthExceeded { requested: usize, height: usize },
    #[error("enumeration depth {requested} exceeds bound {bound}")]
    BoundExceeded { requested: usize, bound: usize },
    #[error("invalid measure spec: {0}")]
    InvalidSpec(String),
    #[error("table spec does not cover code {0:?}")]
    UncoveredPrefix(String),
    #[error("operation requires a uniform measure spec")]
    NonUniformSpec,
    #[error("inconsistent capacity: {0}")]
    InconsistentCapacity(String),
    #[error("weights ({b0}, {b1}) are in the positive-capacity regime")]
    WrongRegime { b0: String, b1: String },
    #[error("search cutoff {0} exceeded")]
    CutoffExceeded(usize),
    #[error("non-monotone targets: {0}")]
    NonMonotoneTargets(String),
    #[error("degenerate weights: {0}")]
    DegenerateWeights(String),
    #[error("leaf budget exceeded: {needed} leaves needed, budget {budget}")]
    LeafBudgetExceeded { needed: usize, budget: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unparsable rational {0:?}")]
    ParseRational(String),
}

impl Error {
    /// Stable kebab-case identifier used in CLI error payloads.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MalformedCode(_) => "malformed-code",
            Error::InvalidBitString(_) => "invalid-bit-string",
            Error::InvalidTree(_) => "invalid-tree",
            Error::DepthExceeded { .. } => "depth-exceeded",
            Error::BoundExceeded { .. } => "bound-exceeded",
            Error::InvalidSpec(_) => "invalid-spec",
            Error::UncoveredPrefix(_) => "uncovered-prefix",
            Error::NonUniformSpec => "non-uniform-spec",
            Error::InconsistentCapacity(_) => "inconsistent-capacity",
            Error::WrongRegime { .. } => "wrong-regime",
            Error::CutoffExceeded(_) => "cutoff-exceeded",
            Error::NonMonotoneTargets(_) => "non-monotone-targets",
            Error::DegenerateWeights(_) => "degenerate-weights",
            Error::LeafBudgetExceeded { .. } => "leaf-budget-exceeded",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::ParseRational(_) => "parse-rational",
        }
    }
}
