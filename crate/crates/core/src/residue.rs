//! Sets of residues mod `p_ℓ`, i.e. unions of level-`ℓ` cylinders.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::families::LevelRule;
use crate::skeleton::Symbol;

/// Which residues of a skeleton a set collects.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selection {
    Symbol(Symbol),
    Filled,
    Holes,
}

impl Selection {
    pub fn accepts(self, s: Symbol) -> bool {
        match self {
            Selection::Symbol(t) => s == t,
            Selection::Filled => true,
            Selection::Holes => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Repr {
    /// Sorted residues.
    Explicit(Vec<u64>),
    /// Residues described by per-level hole digit sets.
    HoleTree { levels: Vec<LevelRule>, selection: Selection },
}

/// A set of residues mod `p_level` with its exact cardinality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueSet {
    level: usize,
    modulus: BigUint,
    len: BigUint,
    repr: Repr,
}

impl ResidueSet {
    pub fn explicit(level: usize, modulus: BigUint, mut residues: Vec<u64>) -> Self {
        residues.sort_unstable();
        residues.dedup();
        debug_assert!(residues.last().is_none_or(|&r| BigUint::from(r) < modulus));
        ResidueSet { level, modulus, len: BigUint::from(residues.len()), repr: Repr::Explicit(residues) }
    }

    pub(crate) fn hole_tree(
        level: usize,
        modulus: BigUint,
        levels: Vec<LevelRule>,
        selection: Selection,
        len: BigUint,
    ) -> Self {
        ResidueSet { level, modulus, len, repr: Repr::HoleTree { levels, selection } }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn len(&self) -> &BigUint {
        &self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == BigUint::ZERO
    }

    pub fn repr(&self) -> &Repr {
        &self.repr
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self.repr, Repr::Explicit(_))
    }

    pub fn residues(&self) -> Option<&[u64]> {
        match &self.repr {
            Repr::Explicit(r) => Some(r),
            Repr::HoleTree { .. } => None,
        }
    }

    /// Haar measure of the union of cylinders: `len / p_level`.
    pub fn measure(&self) -> BigRational {
        BigRational::new(BigInt::from(self.len.clone()), BigInt::from(self.modulus.clone()))
    }

    /// Membership of `r mod p_level`.
    pub fn contains(&self, r: &BigUint) -> bool {
        let r = r % &self.modulus;
        match &self.repr {
            Repr::Explicit(list) => r.to_u64().is_some_and(|r| list.binary_search(&r).is_ok()),
            Repr::HoleTree { levels, selection } => {
                let mut rest = r;
                for (i, rule) in levels.iter().enumerate() {
                    let (quot, digit) = rest.div_rem(&BigUint::from(rule.q));
                    rest = quot;
                    let digit = digit.to_u64().expect("digit below radix");
                    if let Some(s) = rule.symbol(i + 1, digit) {
                        return selection.accepts(s);
                    }
                }
                *selection == Selection::Holes
            }
        }
    }

    /// Whether the lift of `self` to the finer modulus lies inside `finer`.
    /// `None` when either set is not explicit.
    pub fn lifts_into(&self, finer: &ResidueSet) -> Option<bool> {
        let (coarse, fine) = (self.residues()?, finer.residues()?);
        let p = self.modulus.to_u64()?;
        let p_fine = finer.modulus.to_u64()?;
        if p_fine % p != 0 {
            return Some(false);
        }
        Some(coarse.iter().all(|&r| (0..p_fine / p).all(|t| fine.binary_search(&(r + t * p)).is_ok())))
    }

    /// `None` when either set is not explicit.
    pub fn is_disjoint(&self, other: &ResidueSet) -> Option<bool> {
        let (a, b) = (self.residues()?, other.residues()?);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return Some(false),
            }
        }
        Some(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_basics() {
        let a = ResidueSet::explicit(2, BigUint::from(4u8), vec![2, 0, 2]);
        assert_eq!(a.residues().unwrap(), &[0, 2]);
        assert_eq!(a.measure(), BigRational::new(1.into(), 2.into()));
        assert!(a.contains(&BigUint::from(6u8)));
        assert!(!a.contains(&BigUint::from(3u8)));
        let b = ResidueSet::explicit(3, BigUint::from(8u8), vec![0, 2, 4, 6, 1]);
        assert_eq!(a.lifts_into(&b), Some(true));
        let c = ResidueSet::explicit(3, BigUint::from(8u8), vec![0, 2, 4]);
        assert_eq!(a.lifts_into(&c), Some(false));
        let v = ResidueSet::explicit(2, BigUint::from(4u8), vec![3]);
        assert_eq!(a.is_disjoint(&v), Some(true));
        assert_eq!(a.is_disjoint(&a), Some(false));
    }

    #[test]
    fn hole_tree_membership_matches_digits() {
        // q = 4, holes {1, 2}: fills 0 and 3 with alternating symbols.
        let levels = vec![LevelRule::new(4, [1, 2]), LevelRule::new(4, [1, 2])];
        let holes = ResidueSet::hole_tree(2, BigUint::from(16u8), levels.clone(), Selection::Holes, BigUint::from(4u8));
        let found: Vec<u64> = (0..16u64).filter(|&r| holes.contains(&BigUint::from(r))).collect();
        assert_eq!(found, [5, 6, 9, 10]);
        let filled = ResidueSet::hole_tree(2, BigUint::from(16u8), levels, Selection::Filled, BigUint::from(12u8));
        assert!((0..16u64).all(|r| filled.contains(&BigUint::from(r)) != found.contains(&r)));
        assert!(!filled.is_explicit());
        assert_eq!(filled.measure(), BigRational::new(3.into(), 4.into()));
    }
}
