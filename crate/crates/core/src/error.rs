use thiserror::Error;

/// Errors raised by the tensor calculus, the code constructions and the
/// repeater analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: u32, modulus: u32 },

    #[error("modulus {0} is not prime")]
    NonPrimeModulus(u32),

    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u32),

    #[error("moduli differ: {0} vs {1}")]
    ModulusMismatch(u32, u32),

    #[error("interpolation point {0} appears more than once")]
    DuplicatePoint(u32),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("automorphisms with different directions cannot be composed")]
    DirectionMismatch,

    #[error("multiplier {multiplier} is not a unit modulo {modulus}")]
    IllegalMultiplier { multiplier: u32, modulus: u32 },

    #[error("index {index} out of range for {len} qudits")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("dense oracle dimension {dim} exceeds cap {cap}")]
    OracleCapExceeded { dim: usize, cap: usize },

    #[error("table of {size} entries exceeds cap {cap}")]
    CapExceeded { size: u128, cap: usize },

    #[error("probability {0} outside [0, 1]")]
    OutOfRange(f64),

    #[error("stabilizer generators {0} and {1} do not commute")]
    NonCommutingGenerators(usize, usize),

    #[error("span of {generators} generators over Z/{modulus}Z exceeds enumeration cap")]
    SpanTooLarge { generators: usize, modulus: u32 },

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("construction only available for the maximal family d = (D+1)/2: {0}")]
    UnsupportedFamily(String),

    #[error("need at least {needed} known positions, got {got}")]
    TooFewPositions { needed: usize, got: usize },

    #[error("number of stations must be even, got {0}")]
    OddN(usize),

    #[error("scenario has no encoding")]
    NoEncoding,

    #[error("abortion threshold {k} must be below code distance {d}")]
    ThresholdExceedsDistance { k: usize, d: usize },

    #[error("brute-force enumeration of {size} configurations exceeds cap")]
    BruteForceCapExceeded { size: u128 },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by a size cap rather than invalid input.
    pub fn is_cap_exceeded(&self) -> bool {
        matches!(
            self,
            Error::OracleCapExceeded { .. }
                | Error::CapExceeded { .. }
                | Error::SpanTooLarge { .. }
                | Error::BruteForceCapExceeded { .. }
        )
    }
}
