//! Hole-tree generators for Toeplitz skeletons, the shipped presets, and the
//! finite-depth validator.
//!
//! A hole-tree rule fixes, per level `ℓ`, a digit base `q_ℓ`, a set `H_ℓ` of
//! hole digits and a symbol for every other digit. A position `n` is filled
//! at level `ℓ` exactly when its first `ℓ − 1` odometer digits are holes and
//! its `ℓ`-th digit is not. The number of holes therefore obeys
//! `h_ℓ = h_{ℓ−1}·|H_ℓ|`, which gives `1 − D(p_ℓ) = ∏_{i≤ℓ} |H_i|/q_i`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::odometer::Scale;
use crate::skeleton::{Determination, Essentiality, SkeletonSpec, Symbol};

/// A set of digits stored as sorted, disjoint, inclusive ranges.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<u64>", into = "Vec<u64>")]
pub struct DigitSet {
    ranges: Vec<(u64, u64)>,
}

impl DigitSet {
    pub fn empty() -> Self {
        DigitSet { ranges: Vec::new() }
    }

    pub fn from_digits(digits: impl IntoIterator<Item = u64>) -> Self {
        let mut ds: Vec<u64> = digits.into_iter().collect();
        ds.sort_unstable();
        ds.dedup();
        let mut ranges: Vec<(u64, u64)> = Vec::new();
        for d in ds {
            match ranges.last_mut() {
                Some((_, hi)) if *hi + 1 == d => *hi = d,
                _ => ranges.push((d, d)),
            }
        }
        DigitSet { ranges }
    }

    /// `{lo, …, hi}`; empty when `lo > hi`.
    pub fn range(lo: u64, hi: u64) -> Self {
        if lo > hi {
            return DigitSet::empty();
        }
        DigitSet { ranges: vec![(lo, hi)] }
    }

    pub fn len(&self) -> u64 {
        self.ranges.iter().map(|(lo, hi)| hi - lo + 1).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn contains(&self, d: u64) -> bool {
        self.ranges.iter().any(|&(lo, hi)| lo <= d && d <= hi)
    }

    pub fn first(&self) -> Option<u64> {
        self.ranges.first().map(|r| r.0)
    }

    pub fn last(&self) -> Option<u64> {
        self.ranges.last().map(|r| r.1)
    }

    /// Least element strictly greater than `d`.
    pub fn next_after(&self, d: u64) -> Option<u64> {
        self.ranges.iter().find_map(|&(lo, hi)| {
            if d < lo {
                Some(lo)
            } else if d < hi {
                Some(d + 1)
            } else {
                None
            }
        })
    }

    /// Number of elements strictly below `d`.
    pub fn count_below(&self, d: u64) -> u64 {
        self.ranges
            .iter()
            .map(|&(lo, hi)| if d <= lo { 0 } else { hi.min(d - 1) - lo + 1 })
            .sum()
    }

    /// `{0, …, q−1} ∖ self`.
    pub fn complement(&self, q: u64) -> DigitSet {
        let mut ranges = Vec::new();
        let mut next = 0u64;
        for &(lo, hi) in &self.ranges {
            if lo >= q {
                break;
            }
            if lo > next {
                ranges.push((next, lo - 1));
            }
            next = hi.saturating_add(1);
        }
        if next < q {
            ranges.push((next, q - 1));
        }
        DigitSet { ranges }
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.ranges.iter().flat_map(|&(lo, hi)| lo..=hi)
    }
}

impl From<Vec<u64>> for DigitSet {
    fn from(v: Vec<u64>) -> Self {
        DigitSet::from_digits(v)
    }
}

impl From<DigitSet> for Vec<u64> {
    fn from(s: DigitSet) -> Self {
        s.iter().collect()
    }
}

impl fmt::Debug for DigitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, &(lo, hi)) in self.ranges.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if lo == hi {
                write!(f, "{lo}")?;
            } else {
                write!(f, "{lo}..={hi}")?;
            }
        }
        write!(f, "}}")
    }
}

/// How filled digits at one level receive their symbols.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolRule {
    /// The `j`-th filled digit (ascending, from 0) at level `ℓ` gets symbol
    /// `(ℓ + j) mod 2`.
    Alternating,
    /// One symbol per filled digit, in ascending digit order.
    Explicit(Vec<Symbol>),
}

/// Digit base, hole digits and symbol assignment for a single level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRule {
    pub q: u64,
    pub holes: DigitSet,
    #[serde(default = "alternating")]
    pub symbols: SymbolRule,
}

fn alternating() -> SymbolRule {
    SymbolRule::Alternating
}

impl LevelRule {
    pub fn new(q: u64, holes: impl IntoIterator<Item = u64>) -> Self {
        LevelRule { q, holes: DigitSet::from_digits(holes), symbols: SymbolRule::Alternating }
    }

    pub fn with_symbols(mut self, symbols: Vec<Symbol>) -> Self {
        self.symbols = SymbolRule::Explicit(symbols);
        self
    }

    pub fn fills(&self) -> DigitSet {
        self.holes.complement(self.q)
    }

    pub fn fill_count(&self) -> u64 {
        self.q - self.holes.count_below(self.q)
    }

    pub fn is_hole(&self, digit: u64) -> bool {
        self.holes.contains(digit)
    }

    /// Symbol of a filled digit at absolute level `level`; `None` for holes.
    pub fn symbol(&self, level: usize, digit: u64) -> Option<Symbol> {
        if digit >= self.q || self.holes.contains(digit) {
            return None;
        }
        let rank = digit - self.holes.count_below(digit);
        Some(match &self.symbols {
            SymbolRule::Alternating => Symbol::from_parity(level as u64 + rank),
            SymbolRule::Explicit(s) => s[rank as usize],
        })
    }

    /// Numbers of filled digits carrying symbol 1 and symbol 0.
    pub fn symbol_counts(&self, level: usize) -> (u64, u64) {
        let fills = self.fill_count();
        match &self.symbols {
            SymbolRule::Alternating => {
                // ranks j with ℓ + j odd
                let ones = if level % 2 == 1 { fills.div_ceil(2) } else { fills / 2 };
                (ones, fills - ones)
            }
            SymbolRule::Explicit(s) => {
                let ones = s.iter().filter(|&&x| x == Symbol::One).count() as u64;
                (ones, s.len() as u64 - ones)
            }
        }
    }

    fn check(&self, level: usize, coverage: bool) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidRule(format!("level {level}: {msg}")));
        if self.q < 2 {
            return bad(format!("base {} is below 2", self.q));
        }
        if let Some(last) = self.holes.last() {
            if last >= self.q {
                return bad(format!("hole digit {last} ≥ q = {}", self.q));
            }
        }
        let holes = self.holes.len();
        if holes == 0 {
            return bad("no hole digit (the sequence would be periodic)".into());
        }
        if holes >= self.q {
            return bad("no filled digit".into());
        }
        if coverage {
            if holes > self.q - 2 {
                return bad(format!("{holes} holes exceed q − 2 = {}", self.q - 2));
            }
            if self.holes.contains(0) || self.holes.contains(self.q - 1) {
                return bad(format!("hole set {:?} contains 0 or q − 1 = {}", self.holes, self.q - 1));
            }
        }
        if let SymbolRule::Explicit(s) = &self.symbols {
            if s.len() as u64 != self.fill_count() {
                return bad(format!("{} symbols for {} filled digits", s.len(), self.fill_count()));
            }
        }
        Ok(())
    }
}

/// How level rules are produced for arbitrary depth.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layering {
    /// Level `ℓ` uses `levels[(ℓ − 1) mod levels.len()]`.
    Cyclic(Vec<LevelRule>),
    /// `q_ℓ = 2^(ℓ + shift)` with hole digits `{1, …, q_ℓ − 2}`.
    DyadicCantor { shift: u32 },
}

/// A deterministic rule generating skeleton layers to any depth.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoleTreeRule {
    pub layering: Layering,
    /// First level from which hole sets must avoid the digits `0` and `q − 1`.
    #[serde(default)]
    pub coverage_from: Option<usize>,
}

impl HoleTreeRule {
    pub fn level(&self, level: usize) -> Result<LevelRule> {
        assert!(level >= 1, "levels start at 1");
        match &self.layering {
            Layering::Cyclic(levels) => {
                if levels.is_empty() {
                    return Err(Error::InvalidRule("cyclic rule without levels".into()));
                }
                Ok(levels[(level - 1) % levels.len()].clone())
            }
            Layering::DyadicCantor { shift } => {
                let e = level as u64 + *shift as u64;
                if e > 63 {
                    return Err(Error::InvalidRule(format!("q_{level} = 2^{e} exceeds 64-bit digits")));
                }
                let q = 1u64 << e;
                Ok(LevelRule { q, holes: DigitSet::range(1, q - 2), symbols: SymbolRule::Alternating })
            }
        }
    }

    pub fn levels(&self, depth: usize) -> Result<Vec<LevelRule>> {
        (1..=depth).map(|l| self.level(l)).collect()
    }

    pub fn scale(&self, depth: usize) -> Result<Scale> {
        let q = (1..=depth).map(|l| self.level(l).map(|r| r.q)).collect::<Result<Vec<_>>>()?;
        Scale::new(q)
    }

    /// Checks the digit-set bounds on levels `1..=depth`.
    pub fn check(&self, depth: usize) -> Result<()> {
        if let Layering::DyadicCantor { shift: 0 } = self.layering {
            return Err(Error::InvalidRule("dyadic Cantor rule needs shift ≥ 1".into()));
        }
        let levels = match &self.layering {
            Layering::Cyclic(levels) => levels.len().max(1),
            Layering::DyadicCantor { .. } => depth,
        };
        for level in 1..=depth.max(levels) {
            let coverage = self.coverage_from.is_some_and(|from| level >= from);
            self.level(level)?.check(level, coverage)?;
        }
        Ok(())
    }

    /// A lower bound on `∏_{i>level} |H_i|/q_i`.
    pub fn tail_lower_bound(&self, level: usize) -> BigRational {
        match &self.layering {
            // Every cycle multiplies by a factor below one, so the tail product is zero.
            Layering::Cyclic(_) => BigRational::zero(),
            // ∏(1 − a_i) ≥ 1 − Σ a_i with a_i = 2^(1−i−shift), Σ_{i>level} a_i = 2^(1−level−shift).
            Layering::DyadicCantor { shift } => {
                let e = level as i64 + *shift as i64 - 1;
                if e <= 0 {
                    return BigRational::zero();
                }
                BigRational::one() - BigRational::new(BigInt::one(), BigInt::one() << e as usize)
            }
        }
    }

    /// Whether `∏_i |H_i|/q_i = 0`, i.e. the generated sequence is regular.
    pub fn proves_regular(&self) -> bool {
        matches!(self.layering, Layering::Cyclic(_))
    }
}

/// Named presets used throughout the tests and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    /// Binary scale, single hole digit `ℓ mod 2`; regular with `μ(∂W) = 0`.
    RulerAlt,
    /// `q_ℓ = 2^(ℓ+1)` with interior holes; irregular,
    /// `μ(∂W) = ∏_{i≥1}(1 − 2^{−i})`.
    FatCantor,
    /// `q ≡ 4`, holes `{1, 2}`; regular with boundary slope term 1/2.
    HalfDim,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::RulerAlt, Preset::FatCantor, Preset::HalfDim];

    pub fn name(self) -> &'static str {
        match self {
            Preset::RulerAlt => "ruler-alt",
            Preset::FatCantor => "fat-cantor",
            Preset::HalfDim => "half-dim",
        }
    }

    pub fn from_name(name: &str) -> Option<Preset> {
        Preset::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn rule(self) -> HoleTreeRule {
        match self {
            Preset::RulerAlt => HoleTreeRule {
                layering: Layering::Cyclic(vec![LevelRule::new(2, [1]), LevelRule::new(2, [0])]),
                coverage_from: None,
            },
            Preset::FatCantor => {
                HoleTreeRule { layering: Layering::DyadicCantor { shift: 1 }, coverage_from: Some(1) }
            }
            Preset::HalfDim => HoleTreeRule {
                layering: Layering::Cyclic(vec![LevelRule::new(4, [1, 2])]),
                coverage_from: Some(1),
            },
        }
    }

    pub fn generate(self, depth: usize) -> SkeletonSpec {
        generate(&self.rule(), depth).expect("presets satisfy the rule bounds")
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Builds a ruled skeleton of the given depth, checking the rule bounds.
pub fn generate(rule: &HoleTreeRule, depth: usize) -> Result<SkeletonSpec> {
    rule.check(depth)?;
    SkeletonSpec::ruled(rule.clone(), depth)
}

/// Per-level outcome of the accidental-periodicity scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LevelVerdict {
    Pass,
    /// The hole `residue` has only one symbol among its descendants and no
    /// holes remain below it: it is periodic at a deeper level only by accident
    /// of the skeleton.
    Fail { residue: BigUint },
    /// Only one symbol seen so far and holes remain at the scan depth.
    Unverifiable { residue: BigUint },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conflict {
    pub level: usize,
    pub residue: BigUint,
    pub earlier_level: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coverage {
    pub start: i64,
    pub end: i64,
    /// First uncovered integers in ascending order (at most 32).
    pub uncovered: Vec<i64>,
    pub total_uncovered: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub depth: usize,
    pub refinement: Option<Conflict>,
    pub periodicity: Vec<(usize, LevelVerdict)>,
    pub coverage: Coverage,
    pub essential: Vec<(usize, Essentiality)>,
    /// Levels at which no hole remains.
    pub holeless_levels: Vec<usize>,
}

impl ValidationReport {
    /// No check failed. Unverifiable entries are reported but tolerated.
    pub fn passed(&self) -> bool {
        self.refinement.is_none()
            && self.periodicity.iter().all(|(_, v)| !matches!(v, LevelVerdict::Fail { .. }))
            && self.coverage.total_uncovered == 0
            && self.essential.iter().all(|(_, e)| !matches!(e, Essentiality::NotEssential { .. }))
            && self.holeless_levels.is_empty()
    }
}

/// Certifies the Toeplitz preconditions of `spec` up to `depth` and on the
/// integer range `[start, end]`.
pub fn validate(
    spec: &SkeletonSpec,
    depth: usize,
    start: i64,
    end: i64,
    budget: u64,
) -> Result<ValidationReport> {
    let refinement = spec.refinement_conflict(depth)?;

    let counts = spec.level_counts(depth)?;
    let holeless_levels: Vec<usize> =
        counts.iter().skip(1).filter(|c| c.holes.is_zero()).map(|c| c.level).collect();

    let mut periodicity = Vec::new();
    for level in 1..depth {
        periodicity.push((level, periodicity_verdict(spec, level, depth, budget)?));
    }

    let mut uncovered = Vec::new();
    let mut total_uncovered = 0;
    for n in start..=end {
        if let Determination::Undetermined { .. } = spec.eval(n, depth)? {
            total_uncovered += 1;
            if uncovered.len() < 32 {
                uncovered.push(n);
            }
        }
    }

    let essential = (1..=depth)
        .map(|level| spec.is_essential(level, depth, budget).map(|e| (level, e)))
        .collect::<Result<Vec<_>>>()?;

    Ok(ValidationReport {
        depth,
        refinement,
        periodicity,
        coverage: Coverage { start, end, uncovered, total_uncovered },
        essential,
        holeless_levels,
    })
}

fn periodicity_verdict(spec: &SkeletonSpec, level: usize, depth: usize, budget: u64) -> Result<LevelVerdict> {
    let mut verdict = LevelVerdict::Pass;
    for hole in spec.hole_representatives(level, budget)? {
        let scan = spec.descendant_symbols(level, &hole, depth)?;
        if scan.zero && scan.one {
            continue;
        }
        if !scan.holes_remain {
            return Ok(LevelVerdict::Fail { residue: hole });
        }
        if verdict == LevelVerdict::Pass {
            verdict = LevelVerdict::Unverifiable { residue: hole };
        }
    }
    Ok(verdict)
}
