//! Exact-to-decimal helpers: rational rendering, 50-digit logarithms and
//! exact logarithm ratios of integers.

use std::cmp::Ordering;

use dashu_float::DBig;
use dashu_int::UBig;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Significant decimal digits used for logarithms and decimal renderings.
pub const PRECISION: usize = 50;

pub fn to_ubig(n: &BigUint) -> UBig {
    UBig::from_le_bytes(&n.to_bytes_le())
}

pub fn decimal_of_uint(n: &BigUint) -> DBig {
    DBig::from(to_ubig(n)).with_precision(PRECISION).value()
}

pub fn decimal_of_ratio(r: &BigRational) -> DBig {
    let num = decimal_of_uint(r.numer().magnitude());
    let den = decimal_of_uint(r.denom().magnitude());
    let q = num / den;
    if r.is_negative() {
        -q
    } else {
        q
    }
}

/// Natural logarithm of a positive integer.
pub fn ln_uint(n: &BigUint) -> DBig {
    assert!(!n.is_zero(), "logarithm of zero");
    if n.is_one() {
        return DBig::ZERO.with_precision(PRECISION).value();
    }
    decimal_of_uint(n).ln()
}

/// Natural logarithm of a positive rational, as `ln(num) − ln(den)`.
pub fn ln_ratio(r: &BigRational) -> DBig {
    assert!(r.is_positive(), "logarithm of a non-positive rational");
    ln_uint(r.numer().magnitude()) - ln_uint(r.denom().magnitude())
}

/// Exact value of `log a / log b` when `a` and `b ≥ 2` are powers of a
/// common base, `None` otherwise.
///
/// Runs Euclid's algorithm on the exponents by repeated exact division:
/// `log a / log b = 1 + log(a/b) / log b` whenever `b | a`.
pub fn exact_log_ratio(a: &BigUint, b: &BigUint) -> Option<BigRational> {
    if a.is_zero() || b <= &BigUint::one() {
        return None;
    }
    // Continued fraction terms of log a / log b.
    let mut terms: Vec<BigInt> = Vec::new();
    let (mut x, mut y) = (a.clone(), b.clone());
    loop {
        if x.is_one() {
            terms.push(BigInt::zero());
            break;
        }
        let mut count = 0u64;
        while x >= y {
            let (quot, rem) = x.div_rem(&y);
            if !rem.is_zero() {
                return None;
            }
            x = quot;
            count += 1;
        }
        terms.push(BigInt::from(count));
        if x.is_one() {
            break;
        }
        std::mem::swap(&mut x, &mut y);
    }
    let mut value = BigRational::from_integer(terms.pop().unwrap_or_default());
    while let Some(t) = terms.pop() {
        value = BigRational::from_integer(t) + value.recip();
    }
    Some(value)
}

/// Renders a decimal with at most `digits` significant digits.
pub fn render(x: &DBig, digits: usize) -> String {
    let rounded = x.clone().with_precision(digits).value();
    let s = rounded.to_string();
    if s.contains('e') || s.contains('E') {
        return s;
    }
    trim_zeros(s)
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        if t.is_empty() || t == "-" {
            "0".to_string()
        } else {
            t.to_string()
        }
    } else {
        s
    }
}

/// Renders an exact rational as `num/den` (or just `num` for integers).
pub fn rational_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `num/den` or a plain integer.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

pub fn compare_decimal(a: &DBig, b: &DBig) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn exact_log_ratio_of_common_powers() {
        let r = exact_log_ratio(&big(1 << 10), &BigUint::from(4u32).pow(11)).unwrap();
        assert_eq!(r, BigRational::new(10.into(), 22.into()));
        assert_eq!(exact_log_ratio(&big(1), &big(7)), Some(BigRational::zero()));
        assert_eq!(exact_log_ratio(&big(27), &big(9)), Some(BigRational::new(3.into(), 2.into())));
        assert_eq!(exact_log_ratio(&big(8), &big(8)), Some(BigRational::one()));
        assert_eq!(exact_log_ratio(&big(6), &big(4)), None);
        assert_eq!(exact_log_ratio(&big(12), &big(2)), None);
        assert_eq!(exact_log_ratio(&big(5), &big(1)), None);
    }

    #[test]
    fn exact_ratio_agrees_with_logarithms() {
        for (a, b) in [(32u64, 8u64), (1 << 40, 1 << 12), (81, 243), (1000, 100000)] {
            let exact = exact_log_ratio(&big(a), &big(b)).unwrap();
            let approx = ln_uint(&big(a)) / ln_uint(&big(b));
            let diff = approx - decimal_of_ratio(&exact);
            assert!(diff.to_f64().value().abs() < 1e-40, "{a} {b}");
        }
    }

    #[test]
    fn ln_two_to_many_digits() {
        let ln2 = ln_uint(&big(2));
        assert_eq!(render(&ln2, 30), "0.693147180559945309417232121458");
    }

    #[test]
    fn rational_round_trip() {
        let r = BigRational::new(BigInt::from(-6), BigInt::from(8));
        assert_eq!(rational_string(&r), "-3/4");
        assert_eq!(parse_rational("-3/4"), Some(r));
        assert_eq!(parse_rational("7"), Some(BigRational::from_integer(7.into())));
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn renders_ratios() {
        let r = BigRational::new(10.into(), 22.into());
        assert_eq!(render(&decimal_of_ratio(&r), 6), "0.454545");
        assert_eq!(render(&decimal_of_ratio(&BigRational::zero()), 6), "0");
    }
}
