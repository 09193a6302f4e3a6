//! Layered skeletons of binary Toeplitz sequences.
//!
//! Level `ℓ` of a skeleton lists the residues modulo `p_ℓ` that become
//! periodic at that level together with their symbol. The full
//! `p_ℓ`-skeleton `Per(p_ℓ, ξ)` is the union of the lifts of layers `1..=ℓ`;
//! residues not covered by it are the holes of level `ℓ`.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{Conflict, DigitSet, HoleTreeRule, LevelRule};
use crate::interval::Interval;
use crate::odometer::Scale;
use crate::residue::{ResidueSet, Selection};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Symbol {
    Zero,
    One,
}

impl Symbol {
    pub fn from_parity(x: u64) -> Symbol {
        if x % 2 == 1 {
            Symbol::One
        } else {
            Symbol::Zero
        }
    }

    pub fn flip(self) -> Symbol {
        match self {
            Symbol::Zero => Symbol::One,
            Symbol::One => Symbol::Zero,
        }
    }

    pub fn as_u8(self) -> u8 {
        self as u8
    }
}

impl TryFrom<u8> for Symbol {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, Self::Error> {
        match v {
            0 => Ok(Symbol::Zero),
            1 => Ok(Symbol::One),
            _ => Err(format!("symbol {v} is not binary")),
        }
    }
}

impl From<Symbol> for u8 {
    fn from(s: Symbol) -> u8 {
        s.as_u8()
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// Value of `ξ_n` as far as the skeleton determines it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Determination {
    /// `level` is the least level whose layer contains `n mod p_level`.
    Symbol { symbol: Symbol, level: usize },
    Undetermined { depth: usize },
}

impl Determination {
    pub fn symbol(&self) -> Option<Symbol> {
        match self {
            Determination::Symbol { symbol, .. } => Some(*symbol),
            Determination::Undetermined { .. } => None,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Backend {
    /// Explicit newly-filled residues; index 0 holds level 1.
    FiniteTable(Vec<BTreeMap<BigUint, Symbol>>),
    /// Layers generated on demand from a hole-tree rule.
    Ruled(HoleTreeRule),
}

/// Layered description of a binary Toeplitz sequence.
#[derive(Clone, Debug)]
pub struct SkeletonSpec {
    scale: Scale,
    backend: Backend,
    // Ruled backends only: level rules 1..=depth.
    levels: Vec<LevelRule>,
}

/// Cumulative counts at one level: residues mod `p_level` filled with each
/// symbol, and the remaining holes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelCounts {
    pub level: usize,
    pub modulus: BigUint,
    pub ones: BigUint,
    pub zeros: BigUint,
    pub holes: BigUint,
}

impl LevelCounts {
    pub fn filled(&self) -> BigUint {
        &self.ones + &self.zeros
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityRow {
    pub level: usize,
    pub modulus: BigUint,
    pub filled: BigUint,
    /// `D(p_ℓ)`.
    pub density: BigRational,
    /// `1 − D(p_ℓ)`.
    pub defect: BigRational,
}

/// Symbols seen among the filled descendants of a hole, down to a depth.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DescendantScan {
    pub zero: bool,
    pub one: bool,
    pub holes_remain: bool,
}

impl DescendantScan {
    pub fn has(&self, s: Symbol) -> bool {
        match s {
            Symbol::Zero => self.zero,
            Symbol::One => self.one,
        }
    }

    fn record(&mut self, s: Symbol) {
        match s {
            Symbol::Zero => self.zero = true,
            Symbol::One => self.one = true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Essentiality {
    Essential,
    /// `Per(divisor, ξ) = Per(p_ℓ, ξ)` for the proper divisor `divisor`.
    NotEssential { divisor: BigUint },
    UnverifiableAtDepth,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Regularity {
    /// `lim D(p_ℓ) = 1`, proven by the generating rule.
    Regular,
    /// `1 − lim D(p_ℓ)` lies in `defect`, whose lower end is positive.
    Irregular { defect: Interval },
    /// `lim D(p_ℓ)` lies in `limit_density`; the data cannot decide.
    Undetermined { limit_density: Interval },
}

impl SkeletonSpec {
    /// A finite table of newly filled residues, one list per level of `scale`.
    ///
    /// Residue bounds and duplicates are checked here; refinement consistency
    /// is left to [`crate::families::validate`] so that broken tables can be
    /// represented and diagnosed.
    pub fn finite(scale: Scale, layers: Vec<Vec<(BigUint, Symbol)>>) -> Result<Self> {
        if layers.len() != scale.depth() {
            return Err(Error::InvalidScale(format!(
                "{} layers for a scale of depth {}",
                layers.len(),
                scale.depth()
            )));
        }
        let mut tables = Vec::with_capacity(layers.len());
        for (i, layer) in layers.into_iter().enumerate() {
            let level = i + 1;
            let modulus = scale.modulus(level);
            let mut table = BTreeMap::new();
            for (residue, symbol) in layer {
                if &residue >= modulus {
                    return Err(Error::ResidueOutOfRange { level, residue, modulus: modulus.clone() });
                }
                if table.insert(residue.clone(), symbol).is_some() {
                    return Err(Error::DuplicateFill { level, residue });
                }
            }
            tables.push(table);
        }
        Ok(SkeletonSpec { scale, backend: Backend::FiniteTable(tables), levels: Vec::new() })
    }

    /// A ruled skeleton of the given depth; see [`crate::families::generate`].
    pub fn ruled(rule: HoleTreeRule, depth: usize) -> Result<Self> {
        rule.check(depth)?;
        let levels = rule.levels(depth)?;
        let scale = Scale::new(levels.iter().map(|l| l.q).collect())?;
        Ok(SkeletonSpec { scale, backend: Backend::Ruled(rule), levels })
    }

    pub fn scale(&self) -> &Scale {
        &self.scale
    }

    pub fn depth(&self) -> usize {
        self.scale.depth()
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn rule(&self) -> Option<&HoleTreeRule> {
        match &self.backend {
            Backend::Ruled(rule) => Some(rule),
            Backend::FiniteTable(_) => None,
        }
    }

    pub fn is_ruled(&self) -> bool {
        self.rule().is_some()
    }

    /// The same skeleton at another depth. Ruled skeletons extend freely;
    /// finite tables can only be truncated.
    pub fn with_depth(&self, depth: usize) -> Result<SkeletonSpec> {
        match &self.backend {
            Backend::Ruled(rule) => SkeletonSpec::ruled(rule.clone(), depth),
            Backend::FiniteTable(tables) => {
                let scale = self.scale.truncated(depth)?;
                Ok(SkeletonSpec {
                    scale,
                    backend: Backend::FiniteTable(tables[..depth].to_vec()),
                    levels: Vec::new(),
                })
            }
        }
    }

    /// Scale truncated or (for ruled skeletons) extended to `depth`.
    pub fn scale_to(&self, depth: usize) -> Result<Scale> {
        if depth <= self.depth() {
            return self.scale.truncated(depth);
        }
        match &self.backend {
            Backend::Ruled(rule) => rule.scale(depth),
            Backend::FiniteTable(_) => Err(Error::DepthExceeded { level: depth, depth: self.depth() }),
        }
    }

    fn check_depth(&self, level: usize) -> Result<()> {
        if level > self.depth() && !self.is_ruled() {
            return Err(Error::DepthExceeded { level, depth: self.depth() });
        }
        Ok(())
    }

    fn level_rule(&self, level: usize) -> Result<Cow<'_, LevelRule>> {
        match (&self.backend, self.levels.get(level - 1)) {
            (Backend::Ruled(_), Some(l)) => Ok(Cow::Borrowed(l)),
            (Backend::Ruled(rule), None) => Ok(Cow::Owned(rule.level(level)?)),
            (Backend::FiniteTable(_), _) => unreachable!("finite tables have no level rules"),
        }
    }

    /// Symbol of `residue mod p_level` if it is newly filled at exactly `level`.
    pub fn fill_at(&self, level: usize, residue: &BigUint) -> Result<Option<Symbol>> {
        self.check_depth(level)?;
        match &self.backend {
            Backend::FiniteTable(tables) => Ok(tables[level - 1].get(residue).copied()),
            Backend::Ruled(_) => {
                let mut rest = residue.clone();
                for i in 1..=level {
                    let rule = self.level_rule(i)?;
                    let (quot, digit) = rest.div_rem(&BigUint::from(rule.q));
                    rest = quot;
                    let digit = digit.to_u64().unwrap_or(0);
                    if i < level && !rule.is_hole(digit) {
                        return Ok(None);
                    }
                    if i == level {
                        return Ok(rule.symbol(level, digit));
                    }
                }
                Ok(None)
            }
        }
    }

    /// Like [`SkeletonSpec::fill_at`] for the residue `k(level, digits)`.
    pub fn fill_at_digits(&self, scale: &Scale, digits: &[u64]) -> Result<Option<Symbol>> {
        let level = digits.len();
        self.check_depth(level)?;
        match &self.backend {
            Backend::FiniteTable(tables) => Ok(tables[level - 1].get(&scale.k_of(digits)?).copied()),
            Backend::Ruled(_) => {
                for (i, &d) in digits[..level - 1].iter().enumerate() {
                    if !self.level_rule(i + 1)?.is_hole(d) {
                        return Ok(None);
                    }
                }
                Ok(self.level_rule(level)?.symbol(level, digits[level - 1]))
            }
        }
    }

    /// `ξ_n` as determined by levels `1..=maxdepth`.
    pub fn eval(&self, n: impl Into<BigInt>, maxdepth: usize) -> Result<Determination> {
        self.check_depth(maxdepth)?;
        let n: BigInt = n.into();
        match &self.backend {
            Backend::FiniteTable(tables) => {
                let mut found: Option<(Symbol, usize)> = None;
                for level in 1..=maxdepth {
                    let modulus = BigInt::from(self.scale.modulus(level).clone());
                    let r = n.mod_floor(&modulus).magnitude().clone();
                    if let Some(&s) = tables[level - 1].get(&r) {
                        match found {
                            None => found = Some((s, level)),
                            Some((_, first)) => {
                                return Err(Error::Inconsistent {
                                    position: n.to_string(),
                                    first,
                                    second: level,
                                })
                            }
                        }
                    }
                }
                Ok(match found {
                    Some((symbol, level)) => Determination::Symbol { symbol, level },
                    None => Determination::Undetermined { depth: maxdepth },
                })
            }
            Backend::Ruled(_) => {
                let mut rest = n;
                for level in 1..=maxdepth {
                    let rule = self.level_rule(level)?;
                    let (quot, digit) = rest.div_mod_floor(&BigInt::from(rule.q));
                    rest = quot;
                    let digit = digit.to_u64().unwrap_or(0);
                    if let Some(symbol) = rule.symbol(level, digit) {
                        return Ok(Determination::Symbol { symbol, level });
                    }
                }
                Ok(Determination::Undetermined { depth: maxdepth })
            }
        }
    }

    /// Cumulative fill and hole counts for levels `0..=lmax`, by recurrence.
    pub fn level_counts(&self, lmax: usize) -> Result<Vec<LevelCounts>> {
        self.check_depth(lmax)?;
        let scale = self.scale_to(lmax)?;
        let mut rows = vec![LevelCounts {
            level: 0,
            modulus: BigUint::one(),
            ones: BigUint::zero(),
            zeros: BigUint::zero(),
            holes: BigUint::one(),
        }];
        for level in 1..=lmax {
            let prev = rows.last().unwrap();
            let q = scale.radix(level);
            let modulus = scale.modulus(level).clone();
            let (new_ones, new_zeros, holes) = match &self.backend {
                Backend::FiniteTable(tables) => {
                    let ones = tables[level - 1].values().filter(|&&s| s == Symbol::One).count();
                    let zeros = tables[level - 1].len() - ones;
                    (BigUint::from(ones), BigUint::from(zeros), None)
                }
                Backend::Ruled(_) => {
                    let rule = self.level_rule(level)?;
                    let (o, z) = rule.symbol_counts(level);
                    let holes = &prev.holes * rule.holes.len();
                    (&prev.holes * o, &prev.holes * z, Some(holes))
                }
            };
            let ones = &prev.ones * q + new_ones;
            let zeros = &prev.zeros * q + new_zeros;
            let filled = &ones + &zeros;
            let holes = holes.unwrap_or_else(|| {
                if filled >= modulus {
                    BigUint::zero()
                } else {
                    &modulus - &filled
                }
            });
            rows.push(LevelCounts { level, modulus, ones, zeros, holes });
        }
        Ok(rows)
    }

    /// Exact `D(p_ℓ)` for `ℓ = 1..=lmax`.
    pub fn density_table(&self, lmax: usize) -> Result<Vec<DensityRow>> {
        Ok(self
            .level_counts(lmax)?
            .into_iter()
            .skip(1)
            .map(|c| {
                let filled = c.filled();
                let density = ratio(&filled, &c.modulus);
                let defect = BigRational::one() - &density;
                DensityRow { level: c.level, modulus: c.modulus, filled, density, defect }
            })
            .collect())
    }

    /// Newly filled residues at `level`, lazily.
    pub fn layer(&self, level: usize) -> Result<Box<dyn Iterator<Item = (BigUint, Symbol)> + '_>> {
        assert!(level >= 1, "levels start at 1");
        self.check_depth(level)?;
        match &self.backend {
            Backend::FiniteTable(tables) => {
                Ok(Box::new(tables[level - 1].iter().map(|(r, &s)| (r.clone(), s))))
            }
            Backend::Ruled(_) => {
                let rule = self.level_rule(level)?.into_owned();
                let fills: Vec<u64> = rule.fills().iter().collect();
                let step = self.scale_to(level)?.modulus(level - 1).clone();
                let holes = self.ruled_holes(level - 1)?;
                Ok(Box::new(holes.flat_map(move |h| {
                    let rule = rule.clone();
                    let step = step.clone();
                    fills.clone().into_iter().map(move |d| {
                        (&h + &step * d, rule.symbol(level, d).expect("filled digit"))
                    })
                })))
            }
        }
    }

    fn ruled_holes(&self, level: usize) -> Result<HoleIter> {
        let sets = (1..=level)
            .map(|l| self.level_rule(l).map(|r| r.holes.clone()))
            .collect::<Result<Vec<_>>>()?;
        let scale = self.scale_to(level)?;
        Ok(HoleIter::new(sets, scale.moduli()[..level].to_vec()))
    }

    /// Hole residues at `level` in ascending order (finite tables) or digit
    /// order (ruled skeletons), lazily where possible.
    pub fn holes(&self, level: usize) -> Result<Box<dyn Iterator<Item = BigUint> + '_>> {
        self.check_depth(level)?;
        match &self.backend {
            Backend::Ruled(_) => Ok(Box::new(self.ruled_holes(level)?)),
            Backend::FiniteTable(tables) => {
                let mut frontier = vec![BigUint::zero()];
                for l in 1..=level {
                    let q = self.scale.radix(l);
                    let step = self.scale.modulus(l - 1);
                    frontier = frontier
                        .iter()
                        .flat_map(|h| (0..q).map(move |t| h + step * t))
                        .filter(|c| !tables[l - 1].contains_key(c))
                        .collect();
                }
                frontier.sort();
                Ok(Box::new(frontier.into_iter()))
            }
        }
    }

    /// All holes at `level` when `p_level` fits the budget. Beyond the budget
    /// a ruled skeleton returns a single hole: every hole of a hole-tree rule
    /// has the same descendant structure.
    pub fn hole_representatives(&self, level: usize, budget: u64) -> Result<Vec<BigUint>> {
        let scale = self.scale_to(level)?;
        if scale.modulus(level) <= &BigUint::from(budget) {
            return Ok(self.holes(level)?.collect());
        }
        match &self.backend {
            Backend::Ruled(_) => Ok(self.ruled_holes(level)?.take(1).collect()),
            Backend::FiniteTable(_) => Err(Error::BudgetExceeded {
                level,
                modulus: scale.modulus(level).clone(),
                budget,
            }),
        }
    }

    /// Symbols among filled descendants of the hole `residue mod p_level`
    /// at levels `level+1..=depth`.
    pub fn descendant_symbols(&self, level: usize, residue: &BigUint, depth: usize) -> Result<DescendantScan> {
        self.check_depth(depth)?;
        let mut scan = DescendantScan::default();
        match &self.backend {
            Backend::Ruled(_) => {
                for l in level + 1..=depth {
                    let (ones, zeros) = self.level_rule(l)?.symbol_counts(l);
                    scan.one |= ones > 0;
                    scan.zero |= zeros > 0;
                }
                // Hole sets are never empty, so holes survive at every depth.
                scan.holes_remain = true;
            }
            Backend::FiniteTable(tables) => {
                let mut frontier = vec![residue.clone()];
                for l in level + 1..=depth {
                    let q = self.scale.radix(l);
                    let step = self.scale.modulus(l - 1);
                    let mut next = Vec::new();
                    for h in &frontier {
                        for t in 0..q {
                            let c = h + step * t;
                            match tables[l - 1].get(&c) {
                                Some(&s) => scan.record(s),
                                None => next.push(c),
                            }
                        }
                    }
                    frontier = next;
                    if (scan.zero && scan.one) || frontier.is_empty() {
                        break;
                    }
                }
                scan.holes_remain = !frontier.is_empty();
            }
        }
        Ok(scan)
    }

    pub(crate) fn residue_set(&self, level: usize, selection: Selection, budget: u64) -> Result<ResidueSet> {
        let scale = self.scale_to(level)?;
        let modulus = scale.modulus(level).clone();
        let counts = self.level_counts(level)?.pop().expect("level 0 row");
        let len = match selection {
            Selection::Symbol(Symbol::One) => counts.ones.clone(),
            Selection::Symbol(Symbol::Zero) => counts.zeros.clone(),
            Selection::Filled => counts.filled(),
            Selection::Holes => counts.holes.clone(),
        };
        let Some(p) = modulus.to_u64().filter(|&p| p <= budget) else {
            return match &self.backend {
                Backend::Ruled(_) => {
                    let levels = (1..=level)
                        .map(|l| self.level_rule(l).map(Cow::into_owned))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(ResidueSet::hole_tree(level, modulus, levels, selection, len))
                }
                Backend::FiniteTable(_) => Err(Error::BudgetExceeded { level, modulus, budget }),
            };
        };
        let residues: Vec<u64> = match selection {
            Selection::Holes => self.holes(level)?.map(|r| r.to_u64().expect("below budget")).collect(),
            _ => {
                let mut out = Vec::new();
                for j in 1..=level {
                    let pj = scale.modulus(j).to_u64().expect("below budget");
                    for (r, s) in self.layer(j)? {
                        if selection.accepts(s) {
                            let r = r.to_u64().expect("below budget");
                            out.extend((0..p / pj).map(|t| r + t * pj));
                        }
                    }
                }
                out
            }
        };
        Ok(ResidueSet::explicit(level, modulus, residues))
    }

    /// The `p_ℓ`-skeleton as a residue set mod `p_ℓ`: lifts of layers `1..=ℓ`.
    pub fn per_set(&self, level: usize, budget: u64) -> Result<ResidueSet> {
        self.residue_set(level, Selection::Filled, budget)
    }

    /// Whether `p_level` is an essential period, checked against the maximal
    /// proper divisors `p_level / r` for primes `r`.
    ///
    /// `Per(p′) = Per(p)` forces `Per(gcd(p, p′)) = Per(p)`, so only proper
    /// divisors matter, and those are dominated by the maximal ones. Holes
    /// are explored down to `depth`.
    pub fn is_essential(&self, level: usize, depth: usize, budget: u64) -> Result<Essentiality> {
        if level == 0 {
            return Ok(Essentiality::Essential);
        }
        let depth = depth.max(level);
        self.check_depth(depth)?;
        let scale = self.scale_to(level)?;
        let p = scale.modulus(level).clone();
        let mut primes = BTreeSet::new();
        for &q in &scale.radices()[..level] {
            primes.extend(prime_factors(q));
        }
        let mut unverifiable = false;
        for r in primes {
            let divisor = &p / r;
            match self.divisor_search(level, depth, &p, &divisor, r, budget)? {
                ClassOutcome::NonConstant => {}
                ClassOutcome::Unknown => unverifiable = true,
                ClassOutcome::Constant => return Ok(Essentiality::NotEssential { divisor }),
            }
        }
        Ok(if unverifiable { Essentiality::UnverifiableAtDepth } else { Essentiality::Essential })
    }

    /// Looks for a position of `Per(p)` outside `Per(divisor)`.
    fn divisor_search(
        &self,
        level: usize,
        depth: usize,
        p: &BigUint,
        divisor: &BigUint,
        r: u64,
        budget: u64,
    ) -> Result<ClassOutcome> {
        // Positions filled exactly at `level` are the likeliest witnesses.
        for (k, _) in self.layer(level)?.take(budget as usize) {
            let members: Vec<BigUint> = (0..r).map(|j| (&k + divisor * j) % p).collect();
            if self.classify_class(&members, level, depth)? == ClassOutcome::NonConstant {
                return Ok(ClassOutcome::NonConstant);
            }
        }
        let Some(d) = divisor.to_u64().filter(|_| p <= &BigUint::from(budget)) else {
            return Ok(ClassOutcome::Unknown);
        };
        let mut outcome = ClassOutcome::Constant;
        for k in 0..d {
            let members: Vec<BigUint> = (0..r).map(|j| BigUint::from(k + j * d)).collect();
            match self.classify_class(&members, level, depth)? {
                ClassOutcome::NonConstant => return Ok(ClassOutcome::NonConstant),
                ClassOutcome::Unknown => outcome = ClassOutcome::Unknown,
                ClassOutcome::Constant => {}
            }
        }
        Ok(outcome)
    }

    /// Whether `ξ` is constant on the union of the residue classes `members`
    /// mod `p_level`. Classes without a filled member do not meet `Per(p_level)`
    /// and count as constant.
    fn classify_class(&self, members: &[BigUint], level: usize, depth: usize) -> Result<ClassOutcome> {
        let mut filled: Option<Symbol> = None;
        let mut holes = Vec::new();
        for c in members {
            match self.eval(BigInt::from(c.clone()), level)? {
                Determination::Symbol { symbol, .. } => match filled {
                    Some(s) if s != symbol => return Ok(ClassOutcome::NonConstant),
                    _ => filled = Some(symbol),
                },
                Determination::Undetermined { .. } => holes.push(c),
            }
        }
        let Some(s) = filled else {
            return Ok(ClassOutcome::Constant);
        };
        let mut outcome = ClassOutcome::Constant;
        for h in holes {
            let scan = self.descendant_symbols(level, h, depth)?;
            if scan.has(s.flip()) {
                return Ok(ClassOutcome::NonConstant);
            }
            if scan.holes_remain {
                outcome = ClassOutcome::Unknown;
            }
        }
        Ok(outcome)
    }

    /// Enclosure of `1 − lim D(p_ℓ)` from data up to `lmax`.
    pub fn defect_bounds(&self, lmax: usize) -> Result<Interval> {
        let counts = self.level_counts(lmax)?.pop().expect("level 0 row");
        let hi = ratio(&counts.holes, &counts.modulus);
        let lo = match &self.backend {
            Backend::Ruled(rule) => &hi * rule.tail_lower_bound(lmax),
            Backend::FiniteTable(_) => BigRational::zero(),
        };
        Ok(Interval::new(lo, hi))
    }

    pub fn regularity(&self, lmax: usize) -> Result<Regularity> {
        let defect = self.defect_bounds(lmax)?;
        if self.rule().is_some_and(HoleTreeRule::proves_regular) {
            return Ok(Regularity::Regular);
        }
        if defect.lo() > &BigRational::zero() {
            return Ok(Regularity::Irregular { defect });
        }
        let one = BigRational::one();
        Ok(Regularity::Undetermined { limit_density: Interval::new(&one - defect.hi(), &one - defect.lo()) })
    }

    /// First residue at some level `2..=depth` whose reduction was already
    /// filled at an earlier level.
    pub fn refinement_conflict(&self, depth: usize) -> Result<Option<Conflict>> {
        self.check_depth(depth)?;
        let Backend::FiniteTable(tables) = &self.backend else {
            return Ok(None);
        };
        for level in 2..=depth {
            for residue in tables[level - 1].keys() {
                for earlier in 1..level {
                    if tables[earlier - 1].contains_key(&(residue % self.scale.modulus(earlier))) {
                        return Ok(Some(Conflict { level, residue: residue.clone(), earlier_level: earlier }));
                    }
                }
            }
        }
        Ok(None)
    }

    /// `ξ_a … ξ_b`, failing if any position is undetermined at `maxdepth`.
    pub fn word(&self, start: i64, end: i64, maxdepth: usize) -> Result<Word> {
        let mut symbols = Vec::new();
        let mut missing = Vec::new();
        let mut total = 0;
        for n in start..=end {
            match self.eval(n, maxdepth)? {
                Determination::Symbol { symbol, .. } => symbols.push(symbol),
                Determination::Undetermined { .. } => {
                    total += 1;
                    if missing.len() < 32 {
                        missing.push(n);
                    }
                }
            }
        }
        if total > 0 {
            return Err(Error::Undetermined { depth: maxdepth, positions: missing, total });
        }
        Ok(Word { start, symbols })
    }

    /// Number of distinct length-`n` factors of `ξ_start … ξ_end`.
    pub fn complexity(&self, n: usize, start: i64, end: i64, maxdepth: usize) -> Result<usize> {
        Ok(self.word(start, end, maxdepth)?.factor_count(n))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ClassOutcome {
    Constant,
    NonConstant,
    Unknown,
}

fn ratio(num: &BigUint, den: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

fn prime_factors(mut q: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2u64;
    while f * f <= q {
        if q.is_multiple_of(f) {
            out.push(f);
            while q.is_multiple_of(f) {
                q /= f;
            }
        }
        f += if f == 2 { 1 } else { 2 };
    }
    if q > 1 {
        out.push(q);
    }
    out
}

/// Mixed-radix counter over hole-digit tuples `H_1 × … × H_ℓ`.
struct HoleIter {
    sets: Vec<DigitSet>,
    moduli: Vec<BigUint>,
    current: Option<Vec<u64>>,
}

impl HoleIter {
    fn new(sets: Vec<DigitSet>, moduli: Vec<BigUint>) -> Self {
        let current = sets.iter().map(DigitSet::first).collect::<Option<Vec<_>>>();
        HoleIter { sets, moduli, current }
    }
}

impl Iterator for HoleIter {
    type Item = BigUint;

    fn next(&mut self) -> Option<BigUint> {
        let cur = self.current.as_mut()?;
        let value = cur.iter().zip(&self.moduli).fold(BigUint::zero(), |acc, (&d, p)| acc + p * d);
        let mut i = 0;
        loop {
            if i == cur.len() {
                self.current = None;
                break;
            }
            if let Some(next) = self.sets[i].next_after(cur[i]) {
                cur[i] = next;
                break;
            }
            cur[i] = self.sets[i].first().expect("non-empty");
            i += 1;
        }
        Some(value)
    }
}

/// A finite window `ξ_start … ξ_end` of a sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Word {
    start: i64,
    symbols: Vec<Symbol>,
}

impl Word {
    pub fn new(start: i64, symbols: Vec<Symbol>) -> Self {
        Word { start, symbols }
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    /// Inclusive end; `start − 1` for an empty word.
    pub fn end(&self) -> i64 {
        self.start + self.symbols.len() as i64 - 1
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn get(&self, n: i64) -> Option<Symbol> {
        let i = usize::try_from(n - self.start).ok()?;
        self.symbols.get(i).copied()
    }

    pub fn factor_count(&self, n: usize) -> usize {
        if n == 0 {
            return 1;
        }
        self.symbols.windows(n).collect::<HashSet<_>>().len()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Interior positions `k ∈ [start+margin, end−margin]` of `word` whose
/// visible translates `k + np` all carry the same symbol.
///
/// This over-approximates `Per(p, ξ)` on the window: agreement on the
/// visible translates does not certify agreement on all of `ℤ`.
pub fn brute_per(word: &Word, p: u64, margin: u64) -> Result<Vec<i64>> {
    let span = word.end() - word.start();
    if p == 0 || margin < p || span < 3 * p as i64 {
        return Err(Error::WindowTooSmall { start: word.start(), end: word.end(), period: p, margin });
    }
    let p_len = p as usize;
    let mut constant = vec![true; p_len];
    let mut seen: Vec<Option<Symbol>> = vec![None; p_len];
    for (i, &s) in word.symbols.iter().enumerate() {
        let class = i % p_len;
        match seen[class] {
            None => seen[class] = Some(s),
            Some(t) if t != s => constant[class] = false,
            _ => {}
        }
    }
    let lo = word.start() + margin as i64;
    let hi = word.end() - margin as i64;
    Ok((lo..=hi).filter(|&k| constant[(k - word.start()) as usize % p_len]).collect())
}
