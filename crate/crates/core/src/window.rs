//! The window `W = closure(U)` in the odometer and its model set.
//!
//! `U_ℓ` (resp. `V_ℓ`) is the union of level-`ℓ` cylinders `[w]` whose
//! residue `k(ℓ, w)` is filled with 1 (resp. 0) by level `ℓ`. `U` and `V` are
//! the increasing unions, and `∂W = Ω ∖ (U ∪ V)`.

use num_bigint::{BigInt, BigUint};
use num_traits::One;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::odometer::OdometerPoint;
use crate::residue::{ResidueSet, Selection};
use crate::skeleton::{Determination, SkeletonSpec, Symbol};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowLevel {
    pub level: usize,
    pub u: ResidueSet,
    pub v: ResidueSet,
    /// `N(ℓ)`: cylinders of level `ℓ` in neither `U_ℓ` nor `V_ℓ`.
    pub undetermined: BigUint,
}

impl WindowLevel {
    pub fn modulus(&self) -> &BigUint {
        self.u.modulus()
    }
}

pub fn window_level(spec: &SkeletonSpec, level: usize, budget: u64) -> Result<WindowLevel> {
    if level == 0 {
        let empty = ResidueSet::explicit(0, BigUint::one(), Vec::new());
        return Ok(WindowLevel { level, u: empty.clone(), v: empty, undetermined: BigUint::one() });
    }
    let u = spec.residue_set(level, Selection::Symbol(Symbol::One), budget)?;
    let v = spec.residue_set(level, Selection::Symbol(Symbol::Zero), budget)?;
    let undetermined = spec.level_counts(level)?.pop().expect("level 0 row").holes;
    Ok(WindowLevel { level, u, v, undetermined })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    /// In the interior `U`; the level is the least deciding one.
    InU(usize),
    /// In `V = Ω ∖ W`.
    InV(usize),
    /// Not decided by levels `1..=L`; within `2·d_L` of `∂W`.
    UndeterminedToDepth(usize),
}

impl Membership {
    pub fn symbol(self) -> Option<Symbol> {
        match self {
            Membership::InU(_) => Some(Symbol::One),
            Membership::InV(_) => Some(Symbol::Zero),
            Membership::UndeterminedToDepth(_) => None,
        }
    }
}

pub fn membership(point: &OdometerPoint, spec: &SkeletonSpec, maxdepth: usize) -> Result<Membership> {
    if point.depth() < maxdepth {
        return Err(Error::DepthExceeded { level: maxdepth, depth: point.depth() });
    }
    if point.scale().radices()[..maxdepth] != spec.scale_to(maxdepth)?.radices()[..] {
        return Err(Error::ScaleMismatch);
    }
    for level in 1..=maxdepth {
        match spec.fill_at_digits(point.scale(), point.prefix(level))? {
            Some(Symbol::One) => return Ok(Membership::InU(level)),
            Some(Symbol::Zero) => return Ok(Membership::InV(level)),
            None => {}
        }
    }
    Ok(Membership::UndeterminedToDepth(maxdepth))
}

/// `Λ(W) ∩ [start, end] = {n : τⁿ(0) ∈ W}`. Every integer in the range must
/// be decided by `maxdepth`.
pub fn project(spec: &SkeletonSpec, start: i64, end: i64, maxdepth: usize) -> Result<Vec<i64>> {
    Ok(project_check(spec, start, end, maxdepth)?.members)
}

/// Result of comparing `Λ(W)` with `{n : ξ_n = 1}` on a range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectCheck {
    pub start: i64,
    pub end: i64,
    pub members: Vec<i64>,
    /// Integers where membership and evaluation disagree.
    pub mismatches: Vec<i64>,
}

impl ProjectCheck {
    pub fn matches(&self) -> bool {
        self.mismatches.is_empty()
    }
}

pub fn project_check(spec: &SkeletonSpec, start: i64, end: i64, maxdepth: usize) -> Result<ProjectCheck> {
    let scale = spec.scale_to(maxdepth)?;
    let mut members = Vec::new();
    let mut mismatches = Vec::new();
    let mut missing = Vec::new();
    let mut total = 0;
    for n in start..=end {
        let m = membership(&scale.star(n), spec, maxdepth)?;
        let Some(symbol) = m.symbol() else {
            total += 1;
            if missing.len() < 32 {
                missing.push(n);
            }
            continue;
        };
        if symbol == Symbol::One {
            members.push(n);
        }
        match spec.eval(BigInt::from(n), maxdepth)? {
            Determination::Symbol { symbol: s, .. } if s == symbol => {}
            _ => mismatches.push(n),
        }
    }
    if total > 0 {
        return Err(Error::Undetermined { depth: maxdepth, positions: missing, total });
    }
    Ok(ProjectCheck { start, end, members, mismatches })
}

/// Enclosure of `μ(∂W) = 1 − lim D(p_ℓ)`.
pub fn boundary_measure(spec: &SkeletonSpec, lmax: usize) -> Result<Interval> {
    spec.defect_bounds(lmax)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Properness {
    /// Every level-`κ` hole has descendants of both symbols by `maxdepth`.
    VerifiedToDepth(usize),
    /// The cylinder of `residue` mod `p_κ` meets no `missing`-symbol cylinder
    /// down to `maxdepth`.
    Counterexample { residue: BigUint, missing: Symbol },
}

/// Checks that every level-`κ` cylinder not in `V_κ` meets `U`, and every one
/// not in `U_κ` meets `V`, using levels up to `maxdepth`. Filled cylinders
/// satisfy this trivially, so only holes are inspected.
pub fn properness_check(spec: &SkeletonSpec, kappa: usize, maxdepth: usize, budget: u64) -> Result<Properness> {
    if kappa > maxdepth {
        return Err(Error::DepthExceeded { level: kappa, depth: maxdepth });
    }
    for hole in spec.hole_representatives(kappa, budget)? {
        let scan = spec.descendant_symbols(kappa, &hole, maxdepth)?;
        for missing in [Symbol::One, Symbol::Zero] {
            if !scan.has(missing) {
                return Ok(Properness::Counterexample { residue: hole, missing });
            }
        }
    }
    Ok(Properness::VerifiedToDepth(maxdepth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::Preset;
    use crate::odometer::Scale;
    use num_rational::BigRational;
    use num_traits::Zero;

    const BUDGET: u64 = 1 << 20;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn window_level_examples() {
        let ruler = Preset::RulerAlt.generate(8);
        let w = window_level(&ruler, 2, BUDGET).unwrap();
        assert_eq!(w.u.residues().unwrap(), &[0, 2]);
        assert_eq!(w.v.residues().unwrap(), &[3]);
        assert_eq!(w.undetermined, big(1));
        // Oracle: eval on each residue.
        for r in 0..4u64 {
            let e = ruler.eval(r, 2).unwrap().symbol();
            assert_eq!(e == Some(Symbol::One), w.u.contains(&big(r)));
            assert_eq!(e == Some(Symbol::Zero), w.v.contains(&big(r)));
        }

        let fat = Preset::FatCantor.generate(4);
        let w = window_level(&fat, 2, BUDGET).unwrap();
        assert_eq!((w.u.len(), w.v.len(), &w.undetermined), (&big(10), &big(10), &big(12)));
        let ones = (0..32u64).filter(|&r| fat.eval(r, 2).unwrap().symbol() == Some(Symbol::One)).count();
        assert_eq!(ones, 10);

        let w0 = window_level(&fat, 0, BUDGET).unwrap();
        assert!(w0.u.is_empty() && w0.v.is_empty());
        assert_eq!(w0.undetermined, big(1));
    }

    #[test]
    fn window_level_beyond_budget() {
        let fat = Preset::FatCantor.generate(8);
        let w = window_level(&fat, 6, 1 << 10).unwrap();
        assert!(!w.u.is_explicit());
        let counts = fat.level_counts(6).unwrap().pop().unwrap();
        assert_eq!(w.u.len() + w.v.len() + &w.undetermined, counts.modulus);
    }

    #[test]
    fn membership_examples() {
        let ruler = Preset::RulerAlt.generate(8);
        let s2 = Scale::constant(2, 2).unwrap();
        assert_eq!(membership(&s2.point(vec![1, 1]).unwrap(), &ruler, 2).unwrap(), Membership::InV(2));
        let s8 = Scale::constant(2, 8).unwrap();
        assert_eq!(membership(&s8.zero(), &ruler, 8).unwrap(), Membership::InU(1));
        let s5 = Scale::constant(2, 5).unwrap();
        let nest = s5.point(vec![1, 0, 1, 0, 1]).unwrap();
        assert_eq!(membership(&nest, &ruler, 5).unwrap(), Membership::UndeterminedToDepth(5));
        assert!(membership(&nest, &ruler, 6).is_err());
        let s3 = Scale::constant(3, 3).unwrap();
        assert!(matches!(membership(&s3.zero(), &ruler, 3), Err(Error::ScaleMismatch)));
    }

    #[test]
    fn project_examples() {
        let ruler = Preset::RulerAlt.generate(8);
        assert_eq!(project(&ruler, 0, 9, 5).unwrap(), [0, 1, 2, 4, 5, 6, 8, 9]);
        assert_eq!(project(&ruler, -4, -1, 5).unwrap(), [-4, -2]);
        assert!(project(&ruler, 1, 0, 5).unwrap().is_empty());
        match project(&ruler, 0, 30, 3) {
            Err(Error::Undetermined { positions, .. }) => assert_eq!(positions[0], 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn boundary_measure_examples() {
        let ruler = Preset::RulerAlt.generate(20);
        let b = boundary_measure(&ruler, 20).unwrap();
        assert_eq!(b.lo(), &BigRational::zero());
        assert_eq!(b.hi(), &BigRational::new(1.into(), BigInt::one() << 20));
        let fat = Preset::FatCantor.generate(4);
        let b = boundary_measure(&fat, 40).unwrap();
        assert!(b.width() < BigRational::new(1.into(), 1_000_000.into()));
    }

    #[test]
    fn properness_examples() {
        let ruler = Preset::RulerAlt.generate(8);
        assert_eq!(properness_check(&ruler, 2, 4, BUDGET).unwrap(), Properness::VerifiedToDepth(4));
        let half = Preset::HalfDim.generate(3);
        assert_eq!(properness_check(&half, 1, 3, BUDGET).unwrap(), Properness::VerifiedToDepth(3));
        let planted = SkeletonSpec::finite(
            Scale::constant(2, 3).unwrap(),
            vec![vec![(big(0), Symbol::Zero)], vec![(big(1), Symbol::One)], vec![(big(3), Symbol::One)]],
        )
        .unwrap();
        assert_eq!(
            properness_check(&planted, 1, 3, BUDGET).unwrap(),
            Properness::Counterexample { residue: big(1), missing: Symbol::Zero }
        );
    }
}
