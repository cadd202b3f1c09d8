use thiserror::Error;

use crate::lattice::Family;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rank {n} is outside the supported range for family {family} (B needs n >= 3, D needs n >= 4, both n <= 16)")]
    InvalidRank { family: Family, n: usize },

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vector is not in the weight lattice: omega coordinate {coord} is {value}")]
    NotInLattice { coord: usize, value: String },

    #[error("type D Weyl element must flip an even number of signs")]
    ParityViolation,

    #[error("invalid signed permutation")]
    InvalidPermutation,

    #[error("half orbit W+(omega_{k}) is undefined for {family}{n}")]
    UndefinedHalfOrbit { family: Family, n: usize, k: usize },

    #[error("operation requires family {expected}")]
    FamilyMismatch { expected: Family },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("coefficient system has a non-integral solution a_{index} = {value}")]
    NonIntegralSolution { index: usize, value: String },

    #[error("no coefficient pairing satisfies the master identity")]
    NoPairingVerified,

    #[error("m({0}) is not available; supply it explicitly")]
    MissingM(u32),

    #[error("2-adic valuation of zero is undefined")]
    ZeroValuation,

    #[error("grid schedule exhausted before modules stabilized")]
    NotStabilized,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
