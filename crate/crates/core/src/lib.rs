//! Binary Toeplitz sequences realised as model sets over odometer groups.
//!
//! A non-periodic binary Toeplitz sequence `ξ` is described by a layered
//! skeleton: at level `ℓ` a set of residues modulo `p_ℓ` becomes periodic
//! with a fixed symbol. The odometer `Ω = ∏ ℤ/q_ℓℤ` serves as internal space
//! of a cut-and-project scheme `(ℤ, Ω, L)` with `L = {(n, τⁿ(0))}`, and the
//! window `W = closure(U)` built from the skeleton reproduces
//! `{n : ξ_n = 1}` as its model set.
//!
//! Modules:
//!
//! - [`odometer`]: mixed-radix arithmetic, the star map, cylinder metrics.
//! - [`skeleton`]: evaluation, `p`-skeletons, densities, essential periods,
//!   regularity.
//! - [`window`]: the sets `U_ℓ`, `V_ℓ`, membership, projection, boundary
//!   measure and properness.
//! - [`dimension`]: box-dimension reports for `Ω` and `∂W`.
//! - [`families`]: hole-tree generators, presets and the validator.
//!
//! Everything is computed with exact integers and rationals; logarithms are
//! only taken when building dimension reports.

pub mod dimension;
pub mod error;
pub mod families;
pub mod interval;
pub mod numeric;
pub mod odometer;
pub mod residue;
pub mod skeleton;
pub mod window;

pub use error::{Error, Result};
pub use interval::Interval;
pub use odometer::{Metric, OdometerPoint, Scale};
pub use residue::ResidueSet;
pub use skeleton::{Determination, SkeletonSpec, Symbol};

/// Default bound on `p_ℓ` below which residue sets are enumerated explicitly.
pub const DEFAULT_BUDGET: u64 = 1 << 20;
