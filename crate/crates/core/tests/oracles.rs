//! Library results against brute-force computations that share no code with
//! the library beyond the public API used to obtain the inputs.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use toeplitz_core::families::Preset;
use toeplitz_core::skeleton::{brute_per, Essentiality, Word};
use toeplitz_core::window::window_level;
use toeplitz_core::{Scale, SkeletonSpec, Symbol};

const BUDGET: u64 = 1 << 20;

/// Hand-written description of a preset: base, hole test and symbol of a
/// filled digit at each level.
struct Oracle {
    preset: Preset,
}

impl Oracle {
    fn q(&self, level: u32) -> u64 {
        match self.preset {
            Preset::RulerAlt => 2,
            Preset::FatCantor => 1 << (level + 1),
            Preset::HalfDim => 4,
        }
    }

    fn is_hole(&self, level: u32, d: u64) -> bool {
        match self.preset {
            Preset::RulerAlt => d == (level % 2) as u64,
            Preset::FatCantor => d != 0 && d != self.q(level) - 1,
            Preset::HalfDim => d == 1 || d == 2,
        }
    }

    fn symbol(&self, level: u32, d: u64) -> u8 {
        // Filled digits are ranked in ascending order within the level.
        let rank = match self.preset {
            Preset::RulerAlt => 0,
            Preset::FatCantor | Preset::HalfDim => u64::from(d != 0),
        };
        ((level as u64 + rank) % 2) as u8
    }

    /// `(symbol, level)` of `n ≥ 0` using digits up to `depth`.
    fn eval(&self, mut n: u64, depth: u32) -> Option<(u8, u32)> {
        for level in 1..=depth {
            let q = self.q(level);
            let d = n % q;
            n /= q;
            if !self.is_hole(level, d) {
                return Some((self.symbol(level, d), level));
            }
        }
        None
    }

    fn modulus(&self, level: u32) -> u64 {
        (1..=level).map(|l| self.q(l)).product()
    }
}

fn levels_within(preset: Preset, bound: u64) -> Vec<u32> {
    let o = Oracle { preset };
    (1..).take_while(|&l| o.modulus(l) <= bound).collect()
}

#[test]
fn symbols_match_hand_oracle() {
    for preset in Preset::ALL {
        let o = Oracle { preset };
        let depth = 6;
        let spec = preset.generate(depth);
        let p = o.modulus(depth as u32).min(1 << 16);
        for n in 0..p {
            let lib = spec.eval(n, depth).unwrap();
            let expected = o.eval(n, depth as u32);
            assert_eq!(lib.symbol().map(Symbol::as_u8), expected.map(|e| e.0), "{preset} n={n}");
        }
    }
}

#[test]
fn density_recurrence_matches_enumeration() {
    for preset in Preset::ALL {
        let o = Oracle { preset };
        let levels = levels_within(preset, 1 << 20);
        let lmax = *levels.last().unwrap();
        let table = preset.generate(lmax as usize).density_table(lmax as usize).unwrap();
        for level in levels {
            let p = o.modulus(level);
            let mut ones = 0u64;
            let mut zeros = 0u64;
            for n in 0..p {
                match o.eval(n, level) {
                    Some((1, _)) => ones += 1,
                    Some(_) => zeros += 1,
                    None => {}
                }
            }
            let row = &table[level as usize - 1];
            assert_eq!(row.density, BigRational::new((ones + zeros).into(), p.into()), "{preset} level {level}");

            let w = window_level(&preset.generate(lmax as usize), level as usize, BUDGET).unwrap();
            assert_eq!(w.u.len(), &BigUint::from(ones));
            assert_eq!(w.v.len(), &BigUint::from(zeros));
            assert_eq!(w.undetermined, BigUint::from(p - ones - zeros));
        }
    }
}

fn word(spec: &SkeletonSpec, start: i64, end: i64) -> Word {
    spec.word(start, end, spec.depth()).unwrap()
}

#[test]
fn brute_per_matches_per_set() {
    for (preset, lmax, depth) in [(Preset::RulerAlt, 8, 24), (Preset::FatCantor, 3, 8), (Preset::HalfDim, 5, 16)] {
        let spec = preset.generate(depth);
        for level in 1..=lmax {
            let p = spec.scale().modulus(level).to_u64().unwrap();
            let next = spec.scale_to(level + 1).unwrap().modulus(level + 1).to_u64().unwrap();
            let span = (16 * p).max(2 * next) as i64;
            let margin = p;
            let w = word(&spec, -span / 2 - margin as i64, span / 2 + margin as i64);
            let brute: BTreeSet<u64> =
                brute_per(&w, p, margin).unwrap().iter().map(|&k| k.rem_euclid(p as i64) as u64).collect();
            let per = spec.per_set(level, BUDGET).unwrap();
            let lib: BTreeSet<u64> = per.residues().unwrap().iter().copied().collect();
            assert_eq!(brute, lib, "{preset} level {level}");
        }
    }
}

/// Interior positions `k` of the window whose visible translates by `p`
/// carry one symbol.
fn visible_per(w: &Word, p: usize, margin: i64) -> BTreeSet<i64> {
    let s = w.symbols();
    let mut constant = vec![true; p];
    for i in p..s.len() {
        if s[i] != s[i - p] {
            constant[i % p] = false;
        }
    }
    (w.start() + margin..=w.end() - margin).filter(|&k| constant[(k - w.start()) as usize % p]).collect()
}

fn exhaustive_essential(w: &Word, p: usize, margin: i64) -> Option<usize> {
    let target = visible_per(w, p, margin);
    (1..p).find(|&d| visible_per(w, d, margin) == target)
}

#[test]
fn divisor_reduction_matches_exhaustive_search() {
    for preset in Preset::ALL {
        let levels = levels_within(preset, 256);
        let depth = *levels.last().unwrap() as usize + 8;
        let spec = preset.generate(depth.min(12));
        let span = 1 << 13;
        let w = word(&spec.with_depth(24).unwrap(), -span, span);
        for level in levels {
            let p = spec.scale().modulus(level as usize).to_usize().unwrap();
            let lib = spec.is_essential(level as usize, spec.depth(), BUDGET).unwrap();
            let brute = exhaustive_essential(&w, p, 256);
            match (lib, brute) {
                (Essentiality::Essential, None) => {}
                (Essentiality::NotEssential { divisor }, Some(d)) => {
                    assert!(d <= divisor.to_usize().unwrap(), "{preset} level {level}")
                }
                other => panic!("{preset} level {level}: {other:?}"),
            }
        }
    }

    // A periodic table: level 2 fills the last hole with the symbol of its sibling class.
    let planted = SkeletonSpec::finite(
        Scale::constant(2, 2).unwrap(),
        vec![vec![(0u8.into(), Symbol::One)], vec![(1u8.into(), Symbol::Zero), (3u8.into(), Symbol::Zero)]],
    )
    .unwrap();
    let w = word(&planted, -64, 64);
    assert_eq!(exhaustive_essential(&w, 4, 8), Some(2));
    assert_eq!(
        planted.is_essential(2, 2, BUDGET).unwrap(),
        Essentiality::NotEssential { divisor: 2u8.into() }
    );
}

#[test]
fn ruled_and_unrolled_tables_agree() {
    for preset in Preset::ALL {
        let depth = if preset == Preset::FatCantor { 3 } else { 8 };
        let ruled = preset.generate(depth);
        let table = SkeletonSpec::finite(
            ruled.scale().clone(),
            (1..=depth).map(|l| ruled.layer(l).unwrap().collect()).collect(),
        )
        .unwrap();
        assert_eq!(table.level_counts(depth).unwrap(), ruled.level_counts(depth).unwrap());
        for level in 1..=depth {
            let a: BTreeSet<BigUint> = table.holes(level).unwrap().collect();
            let b: BTreeSet<BigUint> = ruled.holes(level).unwrap().collect();
            assert_eq!(a, b, "{preset} level {level}");
            assert_eq!(
                table.is_essential(level, depth, BUDGET).unwrap(),
                ruled.is_essential(level, depth, BUDGET).unwrap(),
                "{preset} level {level}"
            );
        }
        for n in -3000..3000 {
            assert_eq!(table.eval(n, depth).unwrap(), ruled.eval(n, depth).unwrap());
        }
    }
}
