use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid rank {rank} for type {family}")]
    InvalidRank { family: char, rank: usize },
    #[error("weight {0} is not dominant")]
    NotDominant(String),
    #[error("eps vector {0} is not in the weight lattice")]
    NonRepresentable(String),
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("multiplicity overflow")]
    MultiplicityOverflow,
    #[error("non-integral division by {0}")]
    NonIntegralDivision(i64),
    #[error("weight {0} is not self-dual")]
    NotSelfDual(String),
    #[error("delta must be nonzero")]
    TrivialDelta,
    #[error("embedding is not proper: {0}")]
    NotProper(String),
    #[error("pushed weight lies outside the X weight lattice")]
    NonIntegralWeight,
    #[error("unsupported shape {0} for constructed restriction")]
    UnsupportedShape(String),
    #[error("inconsistent residual at level {level}: {detail}")]
    InconsistentResidual { level: usize, detail: String },
    #[error("no solution for last label: {0}")]
    NoSolution(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("level mismatch at level {level}: {detail}")]
    Mismatch { level: usize, detail: String },
    #[error("invalid: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
