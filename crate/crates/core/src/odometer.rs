//! Mixed-radix arithmetic on finite truncations of the odometer group
//! `Ω = ∏_ℓ ℤ/q_ℓℤ`.
//!
//! A point is stored at an explicit depth `L`; all arithmetic is exact
//! modulo `p_L = q_1 ⋯ q_L`. The residue `k(ℓ, ω) = Σ ω_i p_{i−1}` identifies
//! the level-`ℓ` prefix of a point with an element of `ℤ/p_ℓℤ`, and the star
//! map `n ↦ τⁿ(0)` is just the mixed-radix expansion of `n mod p_L`.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Digit bases `q_1, …, q_L` together with the partial products `p_ℓ`.
///
/// Cloning is cheap; the moduli are shared.
#[derive(Clone)]
pub struct Scale {
    inner: Arc<ScaleInner>,
}

struct ScaleInner {
    radices: Vec<u64>,
    // p_0 = 1, …, p_L
    moduli: Vec<BigUint>,
}

impl Scale {
    pub fn new(radices: Vec<u64>) -> Result<Self> {
        if let Some(pos) = radices.iter().position(|&q| q < 2) {
            return Err(Error::InvalidScale(format!(
                "q_{} = {} (every base must be at least 2)",
                pos + 1,
                radices[pos]
            )));
        }
        let mut moduli = Vec::with_capacity(radices.len() + 1);
        moduli.push(BigUint::one());
        for &q in &radices {
            let next = moduli.last().unwrap() * q;
            moduli.push(next);
        }
        Ok(Scale { inner: Arc::new(ScaleInner { radices, moduli }) })
    }

    /// Constant scale `q, q, …` of the given depth.
    pub fn constant(q: u64, depth: usize) -> Result<Self> {
        Scale::new(vec![q; depth])
    }

    pub fn depth(&self) -> usize {
        self.inner.radices.len()
    }

    pub fn radices(&self) -> &[u64] {
        &self.inner.radices
    }

    /// `q_level`, 1-indexed.
    pub fn radix(&self, level: usize) -> u64 {
        self.inner.radices[level - 1]
    }

    /// `p_level` for `level ≤ depth`.
    pub fn modulus(&self, level: usize) -> &BigUint {
        &self.inner.moduli[level]
    }

    pub fn moduli(&self) -> &[BigUint] {
        &self.inner.moduli
    }

    pub fn truncated(&self, depth: usize) -> Result<Scale> {
        self.check_level(depth)?;
        if depth == self.depth() {
            return Ok(self.clone());
        }
        Scale::new(self.inner.radices[..depth].to_vec())
    }

    pub fn zero(&self) -> OdometerPoint {
        OdometerPoint { scale: self.clone(), digits: vec![0; self.depth()] }
    }

    pub fn point(&self, digits: Vec<u64>) -> Result<OdometerPoint> {
        if digits.len() != self.depth() {
            return Err(Error::ScaleMismatch);
        }
        self.check_digits(&digits)?;
        Ok(OdometerPoint { scale: self.clone(), digits })
    }

    /// `k(ℓ, w) = Σ_{i ≤ ℓ} w_i p_{i−1}` with `ℓ = w.len()`.
    pub fn k_of(&self, digits: &[u64]) -> Result<BigUint> {
        self.check_level(digits.len())?;
        self.check_digits(digits)?;
        Ok(self.k_of_unchecked(digits))
    }

    pub(crate) fn k_of_unchecked(&self, digits: &[u64]) -> BigUint {
        // Horner from the most significant digit.
        digits
            .iter()
            .zip(&self.inner.radices)
            .rev()
            .fold(BigUint::zero(), |acc, (&d, &q)| acc * q + d)
    }

    /// Mixed-radix digits of `k ∈ [0, p_level)`; inverse of [`Scale::k_of`].
    pub fn digits_of(&self, k: &BigUint, level: usize) -> Result<Vec<u64>> {
        self.check_level(level)?;
        let modulus = self.modulus(level);
        if k >= modulus {
            return Err(Error::OutOfRange { value: k.clone(), modulus: modulus.clone() });
        }
        Ok(expand(k.clone(), &self.inner.radices[..level]))
    }

    /// The star map `n ↦ τⁿ(0)`, truncated to the scale depth.
    pub fn star(&self, n: impl Into<BigInt>) -> OdometerPoint {
        let n: BigInt = n.into();
        let modulus = BigInt::from(self.modulus(self.depth()).clone());
        let reduced = n.mod_floor(&modulus).magnitude().clone();
        OdometerPoint { scale: self.clone(), digits: expand(reduced, self.radices()) }
    }

    fn check_level(&self, level: usize) -> Result<()> {
        if level > self.depth() {
            return Err(Error::DepthExceeded { level, depth: self.depth() });
        }
        Ok(())
    }

    fn check_digits(&self, digits: &[u64]) -> Result<()> {
        for (i, (&d, &q)) in digits.iter().zip(&self.inner.radices).enumerate() {
            if d >= q {
                return Err(Error::DigitOutOfRange { position: i + 1, digit: d, base: q });
            }
        }
        Ok(())
    }
}

fn expand(mut k: BigUint, radices: &[u64]) -> Vec<u64> {
    radices
        .iter()
        .map(|&q| {
            let (quot, rem) = k.div_rem(&BigUint::from(q));
            k = quot;
            rem.iter_u64_digits().next().unwrap_or(0)
        })
        .collect()
}

impl PartialEq for Scale {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.radices == other.inner.radices
    }
}

impl Eq for Scale {}

impl fmt::Debug for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Scale").field(&self.inner.radices).finish()
    }
}

/// A depth-`L` truncation of an element of `Ω`.
#[derive(Clone, PartialEq, Eq)]
pub struct OdometerPoint {
    scale: Scale,
    digits: Vec<u64>,
}

impl OdometerPoint {
    pub fn scale(&self) -> &Scale {
        &self.scale
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn depth(&self) -> usize {
        self.digits.len()
    }

    pub fn prefix(&self, level: usize) -> &[u64] {
        &self.digits[..level]
    }

    /// `k(L, ω)`, the residue mod `p_L` this point stands for.
    pub fn value(&self) -> BigUint {
        self.scale.k_of_unchecked(&self.digits)
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    /// Digitwise sum with carry; a carry out of the last digit is dropped.
    pub fn checked_add(&self, other: &OdometerPoint) -> Result<OdometerPoint> {
        if self.scale != other.scale {
            return Err(Error::ScaleMismatch);
        }
        let mut carry = 0u64;
        let digits = self
            .digits
            .iter()
            .zip(&other.digits)
            .zip(self.scale.radices())
            .map(|((&a, &b), &q)| {
                // a, b < q and carry ≤ 1, so the sum is below 2q; u128 avoids overflow near 2^64.
                let s = a as u128 + b as u128 + carry as u128;
                if s >= q as u128 {
                    carry = 1;
                    (s - q as u128) as u64
                } else {
                    carry = 0;
                    s as u64
                }
            })
            .collect();
        Ok(OdometerPoint { scale: self.scale.clone(), digits })
    }

    /// `τ(ω) = ω + (1, 0, 0, …)`.
    pub fn rotate(&self) -> OdometerPoint {
        let one = self.scale.star(1);
        self.checked_add(&one).expect("same scale")
    }
}

impl fmt::Debug for OdometerPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for OdometerPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.digits.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

/// Diameters `d_ℓ` of level-`ℓ` cylinders under a rotation-invariant metric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Metric {
    /// `d_ℓ = 1/p_{ℓ+1}`.
    Canonical,
    /// Explicit diameters `d_0, d_1, …`, strictly decreasing and positive.
    Custom(Vec<BigRational>),
}

impl Metric {
    /// Builds a custom metric, checking positivity and strict decrease.
    ///
    /// The limit `d_ℓ → 0` cannot be checked on a finite list; callers are
    /// trusted on that point.
    pub fn custom(diameters: Vec<BigRational>) -> Result<Self> {
        if let Some(pos) = diameters.iter().position(|d| !d.is_positive()) {
            return Err(Error::InvalidMetric(format!("d_{pos} = {} is not positive", diameters[pos])));
        }
        if let Some(pos) = diameters.windows(2).position(|w| w[1] >= w[0]) {
            return Err(Error::InvalidMetric(format!(
                "d_{} = {} does not decrease from d_{} = {}",
                pos + 1,
                diameters[pos + 1],
                pos,
                diameters[pos]
            )));
        }
        Ok(Metric::Custom(diameters))
    }

    pub fn diameter(&self, level: usize, scale: &Scale) -> Result<BigRational> {
        match self {
            Metric::Canonical => {
                if level + 1 > scale.depth() {
                    return Err(Error::DepthExceeded { level: level + 1, depth: scale.depth() });
                }
                Ok(BigRational::new(BigInt::one(), BigInt::from(scale.modulus(level + 1).clone())))
            }
            Metric::Custom(ds) => ds
                .get(level)
                .cloned()
                .ok_or(Error::DepthExceeded { level, depth: ds.len().saturating_sub(1) }),
        }
    }

    /// Deepest level with a defined diameter on the given scale.
    pub fn max_level(&self, scale: &Scale) -> Option<usize> {
        match self {
            Metric::Canonical => scale.depth().checked_sub(1),
            Metric::Custom(ds) => ds.len().checked_sub(1),
        }
    }
}
