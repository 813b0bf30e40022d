//! Ramsey interferometry of guided two-level atoms.
//!
//! A fully quantum two-channel treatment of the two field regions feeds
//! fringe scans that are averaged over the occupied levels of a generalized
//! Tonks-Girardeau gas. The [`tgmap`] module builds the many-body
//! wavefunctions themselves: spinor Slater determinants, the Fermi-Bose
//! mapping and the singlet/triplet contact algebra.

// Validation is written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod ramsey;
pub mod scatter;
pub mod specfn;
pub mod tgmap;
pub mod units;

pub use error::{Error, Result};
pub use units::{InternalSetup, PhysicsConfig, UnitSystem, CS133_MASS, HBAR};
