//! Box-dimension reports for the odometer and for the window boundary.
//!
//! With cylinder diameters `d_ℓ` and `N(ℓ)` boundary cylinders at level `ℓ`,
//! each row carries
//!
//! - the ambient ratio `log p_ℓ / (−log d_ℓ)`,
//! - the raw ratio `log N(ℓ) / (−log d_ℓ)`,
//! - the slope term `1 + log(1 − D(p_ℓ)) / log p_ℓ = log N(ℓ) / log p_ℓ`,
//!
//! so that raw = slope · ambient. Upper and lower box dimensions are
//! approximated by sup and inf over a tail of levels; nothing is
//! extrapolated.

use dashu_float::DBig;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::{compare_decimal, decimal_of_ratio, exact_log_ratio, ln_ratio, ln_uint};
use crate::odometer::{Metric, Scale};
use crate::skeleton::{Regularity, SkeletonSpec};

/// A ratio of logarithms: exact when both sides are powers of a common
/// base, always available as a 50-digit decimal.
#[derive(Clone, Debug, PartialEq)]
pub struct Ratio {
    pub exact: Option<BigRational>,
    pub approx: DBig,
}

impl Ratio {
    fn from_exact(r: BigRational) -> Self {
        Ratio { approx: decimal_of_ratio(&r), exact: Some(r) }
    }

    /// `log a / log(1/d)` for `0 < d < 1`.
    fn of_log_over_inverse(a: &BigUint, d: &BigRational) -> Self {
        if d.numer().is_one() {
            if let Some(r) = exact_log_ratio(a, d.denom().magnitude()) {
                return Ratio::from_exact(r);
            }
        }
        Ratio { exact: None, approx: ln_uint(a) / -ln_ratio(d) }
    }

    fn of_logs(a: &BigUint, b: &BigUint) -> Self {
        match exact_log_ratio(a, b) {
            Some(r) => Ratio::from_exact(r),
            None => Ratio { exact: None, approx: ln_uint(a) / ln_uint(b) },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimRow {
    pub level: usize,
    pub modulus: BigUint,
    /// `N(ℓ)`; absent in ambient-only reports.
    pub cover: Option<BigUint>,
    pub diameter: BigRational,
    pub raw: Option<Ratio>,
    pub slope: Option<Ratio>,
    pub ambient: Ratio,
}

impl DimRow {
    /// `|raw − slope · ambient|`, evaluated in decimals.
    pub fn factorization_error(&self) -> Option<DBig> {
        let (raw, slope) = (self.raw.as_ref()?, self.slope.as_ref()?);
        let diff = raw.approx.clone() - slope.approx.clone() * self.ambient.approx.clone();
        Some(if diff < DBig::ZERO { -diff } else { diff })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bounds {
    pub sup: DBig,
    pub inf: DBig,
}

/// Sup and inf of each column over levels `start..=end`.
#[derive(Clone, Debug, PartialEq)]
pub struct TailSummary {
    pub start: usize,
    pub end: usize,
    pub ambient: Bounds,
    pub raw: Option<Bounds>,
    pub slope: Option<Bounds>,
}

/// Whether `lim D(p_ℓ) = 1` holds for the analysed skeleton.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    Satisfied,
    Violated,
    Unverified,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimReport {
    pub rows: Vec<DimRow>,
    pub tail: TailSummary,
    /// Present for boundary reports.
    pub hypothesis: Option<Hypothesis>,
}

impl DimReport {
    fn new(rows: Vec<DimRow>, hypothesis: Option<Hypothesis>) -> Self {
        let end = rows.last().map_or(0, |r| r.level);
        let tail = summarize(&rows, (end / 2).max(1));
        DimReport { rows, tail, hypothesis }
    }

    /// Tail summary over levels `start..=lmax`.
    pub fn tail_from(&self, start: usize) -> TailSummary {
        summarize(&self.rows, start)
    }

    pub fn with_tail_start(mut self, start: usize) -> Self {
        self.tail = summarize(&self.rows, start);
        self
    }
}

fn summarize(rows: &[DimRow], start: usize) -> TailSummary {
    let end = rows.last().map_or(0, |r| r.level);
    let tail: Vec<&DimRow> = rows.iter().filter(|r| r.level >= start).collect();
    let bounds = |values: Vec<&DBig>| -> Option<Bounds> {
        let sup = values.iter().copied().max_by(|a, b| compare_decimal(a, b))?.clone();
        let inf = values.iter().copied().min_by(|a, b| compare_decimal(a, b))?.clone();
        Some(Bounds { sup, inf })
    };
    let zero = || Bounds { sup: DBig::ZERO, inf: DBig::ZERO };
    let ambient = bounds(tail.iter().map(|r| &r.ambient.approx).collect()).unwrap_or_else(zero);
    let column = |f: fn(&DimRow) -> Option<&Ratio>| {
        let values: Option<Vec<&DBig>> = tail.iter().map(|r| f(r).map(|x| &x.approx)).collect();
        values.and_then(bounds)
    };
    TailSummary {
        start,
        end,
        ambient,
        raw: column(|r| r.raw.as_ref()),
        slope: column(|r| r.slope.as_ref()),
    }
}

fn checked_diameter(metric: &Metric, level: usize, scale: &Scale) -> Result<BigRational> {
    let d = metric.diameter(level, scale)?;
    if d >= BigRational::one() || !d.is_positive() {
        return Err(Error::InvalidMetric(format!("d_{level} = {d} is not in (0, 1)")));
    }
    Ok(d)
}

/// Ambient ratios `log p_ℓ / (−log d_ℓ)` for `ℓ = 1..=lmax`.
pub fn dim_ambient(scale: &Scale, metric: &Metric, lmax: usize) -> Result<DimReport> {
    let mut rows = Vec::with_capacity(lmax);
    for level in 1..=lmax {
        let diameter = checked_diameter(metric, level, scale)?;
        let modulus = scale.modulus(level).clone();
        let ambient = Ratio::of_log_over_inverse(&modulus, &diameter);
        rows.push(DimRow { level, modulus, cover: None, diameter, raw: None, slope: None, ambient });
    }
    Ok(DimReport::new(rows, None))
}

/// Boundary report for the canonical window of `spec`. Ruled skeletons are
/// extended as needed for the canonical metric.
pub fn dim_boundary(spec: &SkeletonSpec, metric: &Metric, lmax: usize) -> Result<DimReport> {
    let needed = match metric {
        Metric::Canonical => lmax + 1,
        Metric::Custom(_) => lmax,
    };
    let scale = if spec.is_ruled() { spec.scale_to(needed.max(spec.depth()))? } else { spec.scale().clone() };
    let counts = spec.level_counts(lmax)?;
    let mut rows = Vec::with_capacity(lmax);
    for c in counts.into_iter().skip(1) {
        if c.holes.is_zero() {
            return Err(Error::Periodic { level: c.level });
        }
        let diameter = checked_diameter(metric, c.level, &scale)?;
        let ambient = Ratio::of_log_over_inverse(&c.modulus, &diameter);
        let raw = Ratio::of_log_over_inverse(&c.holes, &diameter);
        let slope = Ratio::of_logs(&c.holes, &c.modulus);
        rows.push(DimRow {
            level: c.level,
            modulus: c.modulus,
            cover: Some(c.holes),
            diameter,
            raw: Some(raw),
            slope: Some(slope),
            ambient,
        });
    }
    let hypothesis = match spec.regularity(lmax)? {
        Regularity::Regular => Hypothesis::Satisfied,
        Regularity::Irregular { .. } => Hypothesis::Violated,
        Regularity::Undetermined { .. } => Hypothesis::Unverified,
    };
    Ok(DimReport::new(rows, Some(hypothesis)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::Preset;
    use crate::numeric::render;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn ambient_examples() {
        let s2 = Scale::constant(2, 12).unwrap();
        let r = dim_ambient(&s2, &Metric::Canonical, 11).unwrap();
        assert_eq!(r.rows[8].level, 9);
        assert_eq!(r.rows[8].ambient.exact, Some(q(9, 10)));
        let s4 = Scale::constant(4, 12).unwrap();
        let r = dim_ambient(&s4, &Metric::Canonical, 11).unwrap();
        assert_eq!(r.rows[8].ambient.exact, Some(q(9, 10)));
        assert_eq!(render(&r.rows[8].ambient.approx, 6), "0.9");

        let identity: Vec<BigRational> =
            s2.moduli().iter().map(|p| BigRational::new(BigInt::one(), BigInt::from(p.clone()))).collect();
        let metric = Metric::custom(identity).unwrap();
        let r = dim_ambient(&s2, &metric, 12).unwrap();
        assert!(r.rows.iter().all(|row| row.ambient.exact == Some(BigRational::one())));
        // The canonical diameter at level 12 needs p_13.
        assert!(dim_ambient(&s2, &Metric::Canonical, 12).is_err());
    }

    #[test]
    fn invalid_diameters_are_rejected() {
        let s2 = Scale::constant(2, 4).unwrap();
        let metric = Metric::custom(vec![q(3, 1), q(2, 1), q(1, 2)]).unwrap();
        assert!(matches!(dim_ambient(&s2, &metric, 2), Err(Error::InvalidMetric(_))));
    }

    #[test]
    fn half_dim_examples() {
        let half = Preset::HalfDim.generate(4);
        let r = dim_boundary(&half, &Metric::Canonical, 12).unwrap();
        for row in &r.rows {
            assert_eq!(row.slope.as_ref().unwrap().exact, Some(q(1, 2)));
            let l = row.level as i64;
            assert_eq!(row.raw.as_ref().unwrap().exact, Some(q(l, 2 * (l + 1))));
        }
        assert_eq!(render(&r.rows[9].raw.as_ref().unwrap().approx, 6), "0.454545");
        assert_eq!(r.hypothesis, Some(Hypothesis::Satisfied));
    }

    #[test]
    fn ruler_slope_vanishes() {
        let ruler = Preset::RulerAlt.generate(4);
        let r = dim_boundary(&ruler, &Metric::Canonical, 20).unwrap();
        assert!(r.rows.iter().all(|row| row.slope.as_ref().unwrap().exact == Some(BigRational::zero())));
        assert_eq!(r.tail.slope.as_ref().unwrap().sup, DBig::ZERO);
    }

    #[test]
    fn fat_cantor_flags_hypothesis() {
        let fat = Preset::FatCantor.generate(4);
        let r = dim_boundary(&fat, &Metric::Canonical, 30).unwrap();
        assert_eq!(r.hypothesis, Some(Hypothesis::Violated));
        let tol = DBig::from_parts(1.into(), -12);
        for row in &r.rows {
            // N(1) = 2 and p_1 = 4 are both powers of 2.
            assert_eq!(row.slope.as_ref().unwrap().exact.is_some(), row.level == 1);
            assert!(row.factorization_error().unwrap() < tol);
        }
    }

    #[test]
    fn periodic_skeletons_are_rejected() {
        let s = crate::SkeletonSpec::finite(
            Scale::constant(2, 3).unwrap(),
            vec![vec![(0u8.into(), crate::Symbol::One), (1u8.into(), crate::Symbol::Zero)], vec![], vec![]],
        )
        .unwrap();
        assert!(matches!(dim_boundary(&s, &Metric::Canonical, 2), Err(Error::Periodic { level: 1 })));
    }

    #[test]
    fn tail_summary_tracks_columns() {
        let half = Preset::HalfDim.generate(4);
        let r = dim_boundary(&half, &Metric::Canonical, 10).unwrap();
        assert_eq!((r.tail.start, r.tail.end), (5, 10));
        let raw = r.tail.raw.as_ref().unwrap();
        assert_eq!(raw.inf, decimal_of_ratio(&q(5, 12)));
        assert_eq!(raw.sup, decimal_of_ratio(&q(10, 22)));
    }
}
