use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid scale: {0}")]
    InvalidScale(String),

    #[error("odometer points live on different scales")]
    ScaleMismatch,

    #[error("digit {digit} at position {position} is out of range for base {base}")]
    DigitOutOfRange { position: usize, digit: u64, base: u64 },

    #[error("value {value} is out of range [0, {modulus})")]
    OutOfRange { value: BigUint, modulus: BigUint },

    #[error("level {level} exceeds available depth {depth}")]
    DepthExceeded { level: usize, depth: usize },

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("residue {residue} ≥ p_{level} = {modulus}")]
    ResidueOutOfRange { level: usize, residue: BigUint, modulus: BigUint },

    #[error("residue {residue} listed twice at level {level}")]
    DuplicateFill { level: usize, residue: BigUint },

    #[error("position {position} is filled at level {first} and again at level {second}")]
    Inconsistent { position: String, first: usize, second: usize },

    #[error("enumeration budget exceeded: p_{level} = {modulus} > {budget}; use a hole-tree (ruled) backend")]
    BudgetExceeded { level: usize, modulus: BigUint, budget: u64 },

    #[error("{total} position(s) undetermined at depth {depth}: {positions:?}")]
    Undetermined { depth: usize, positions: Vec<i64>, total: usize },

    #[error("window [{start}, {end}] is too small for period {period} with margin {margin}")]
    WindowTooSmall { start: i64, end: i64, period: u64, margin: u64 },

    #[error("invalid rule: {0}")]
    InvalidRule(String),

    #[error("no holes remain at level {level}; the sequence is periodic")]
    Periodic { level: usize },
}
