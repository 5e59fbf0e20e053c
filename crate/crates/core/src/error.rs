use thiserror::Error;

/// Errors raised by the algebra kernel, the lifting engine and the oracles.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid ring: {0}")]
    InvalidSpec(String),
    #[error("operands live in different rings")]
    SpecMismatch,
    #[error("value {value} is not a canonical representative (modulus {modulus})")]
    NotCanonical { value: u64, modulus: u64 },
    #[error("element is not a unit")]
    NonUnit,
    #[error("element has valuation {valuation}, cannot divide by pi^{requested}")]
    InsufficientValuation { valuation: u32, requested: u32 },
    #[error("cannot reduce from length {from} to length {to}")]
    BadTarget { from: u32, to: u32 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("matrices {0} and {1} of the tuple do not commute")]
    NonCommutingTuple(usize, usize),
    #[error("variable index {index} out of range for {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },
    #[error("matrix is not cyclic")]
    NotCyclic,
    #[error("vector is not cyclic for the matrix")]
    NotACyclicVector,
    #[error("no cyclic vector found within the search bound")]
    FrameSearchExhausted,
    #[error("matrix does not commute with A")]
    NotInCentralizer,
    #[error("centralizer coordinates do not reconstruct the matrix")]
    ReconstructionFailure,
    #[error("enumeration needs {needed} candidates, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("seed matrices {0} and {1} do not commute")]
    SeedNotCommuting(usize, usize),
    #[error("seed does not solve the residue equation")]
    SeedNotASolution,
    #[error("partial derivative {index} at the seed is neither invertible nor zero")]
    PartialNeitherUnitNorZero { index: usize },
    #[error("no partial derivative is invertible at the seed")]
    NoInvertiblePartial,
    #[error("univariate polynomial is not monic")]
    NotMonic,
    #[error("lifted tuple fails the equation at level {level}")]
    StepVerificationFailed { level: u32 },
    #[error("partial derivative {index} is not invertible at level {level}")]
    NonUnitCorrectionDivisor { index: usize, level: u32 },
    #[error("lift disagrees with the exhaustive oracle: {0}")]
    MismatchDetected(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// Stable variant name, used in machine-readable diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::SpecMismatch => "SpecMismatch",
            Error::NotCanonical { .. } => "NotCanonical",
            Error::NonUnit => "NonUnit",
            Error::InsufficientValuation { .. } => "InsufficientValuation",
            Error::BadTarget { .. } => "BadTarget",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::NotInvertible => "NotInvertible",
            Error::NonCommutingTuple(..) => "NonCommutingTuple",
            Error::VariableOutOfRange { .. } => "VariableOutOfRange",
            Error::NotCyclic => "NotCyclic",
            Error::NotACyclicVector => "NotACyclicVector",
            Error::FrameSearchExhausted => "FrameSearchExhausted",
            Error::NotInCentralizer => "NotInCentralizer",
            Error::ReconstructionFailure => "ReconstructionFailure",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::SeedNotCommuting(..) => "SeedNotCommuting",
            Error::SeedNotASolution => "SeedNotASolution",
            Error::PartialNeitherUnitNorZero { .. } => "PartialNeitherUnitNorZero",
            Error::NoInvertiblePartial => "NoInvertiblePartial",
            Error::NotMonic => "NotMonic",
            Error::StepVerificationFailed { .. } => "StepVerificationFailed",
            Error::NonUnitCorrectionDivisor { .. } => "NonUnitCorrectionDivisor",
            Error::MismatchDetected(_) => "MismatchDetected",
            Error::Parse(_) => "ParseError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
