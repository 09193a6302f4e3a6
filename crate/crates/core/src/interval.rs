use std::fmt;

use num_rational::BigRational;

use crate::numeric::{decimal_of_ratio, rational_string, render};

/// Exact rational enclosure `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: BigRational,
    hi: BigRational,
}

impl Interval {
    /// Panics if `lo > hi`.
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval bounds out of order: {lo} > {hi}");
        Interval { lo, hi }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// `self ⊆ other`.
    pub fn is_within(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            render(&decimal_of_ratio(&self.lo), 12),
            render(&decimal_of_ratio(&self.hi), 12)
        )
    }
}

impl Interval {
    pub fn exact_string(&self) -> String {
        format!("[{}, {}]", rational_string(&self.lo), rational_string(&self.hi))
    }
}
