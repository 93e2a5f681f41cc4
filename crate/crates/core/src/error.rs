use num_bigint::{BigInt, BigUint};
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("elements live in different fields: sqrt({0}) vs sqrt({1})")]
    FieldMismatch(BigInt, BigInt),

    #[error("invalid radicand {0}: expected a non-square integer >= 2")]
    InvalidRadicand(BigInt),

    #[error("({a}+{b}*sqrt({d}))/{den} is not in the ring of integers")]
    NotIntegral { d: BigInt, a: BigInt, b: BigInt, den: u32 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("squarefree status undetermined: cofactor {cofactor} resisted factorisation within budget")]
    Undetermined { cofactor: BigUint },

    #[error("period of sqrt({d}) is longer than {limit}")]
    PeriodTooLong { d: BigUint, limit: usize },

    #[error("sequence is not symmetric")]
    NotSymmetric,

    #[error("sequence entries must be positive integers")]
    NonPositiveEntry,

    #[error("period too short: r = {r}, need r >= {needed}")]
    PeriodTooShort { r: usize, needed: usize },

    #[error("invalid witness indices: {0}")]
    BadIndices(String),

    #[error("degenerate pair: witnesses must be distinct")]
    DegeneratePair,

    #[error("{0} is not totally positive")]
    NotTotallyPositive(String),

    #[error("form is not totally positive definite")]
    IndefiniteForm,

    #[error("D is not squarefree: {0}^2 divides it")]
    NotSquarefree(BigUint),

    #[error("enumeration budget of {0} candidates exceeded")]
    EnumerationBudget(u64),

    #[error("no admissible sequence: {0}")]
    NoAdmissibleSequence(String),

    #[error("no admissible field hit: {0}")]
    NoFieldHit(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}
