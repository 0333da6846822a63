use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid ring: {0}")]
    InvalidRing(String),

    #[error("scale index {index} lies beyond the truncation (last valid index {last})")]
    ScaleBeyondTruncation { index: usize, last: usize },

    #[error("scale M_{index} overflows 64-bit integers")]
    ScaleOverflow { index: usize },

    #[error("enumeration of {what} refused: {estimate} objects exceeds cap {cap}")]
    EnumerationCap {
        what: &'static str,
        estimate: u128,
        cap: u128,
    },

    #[error("vector {0:?} is not a projective direction (no unit coordinate modulo some prime)")]
    NotADirection(Vec<u64>),

    #[error("generator matrix does not span a free rank-{k} summand")]
    NotInGrassmannian { k: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("flat dimension k={k} must satisfy 1 <= k <= n={n}")]
    BadFlatDimension { k: usize, n: usize },

    #[error("prime {p} does not divide the modulus {modulus}")]
    PrimeDoesNotDivide { p: u64, modulus: u64 },

    #[error("density value at point {point:?} is {value}, outside the admissible range {range}")]
    ValueOutOfRange {
        point: Vec<u64>,
        value: String,
        range: &'static str,
    },

    #[error("band index {index} is out of range (0..{bands})")]
    BandOutOfRange { index: usize, bands: usize },

    #[error("operation requires scales, but the ring was built without a scale sequence")]
    NoScales,

    #[error("exact character sum did not reduce to a rational number")]
    NotRational,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
