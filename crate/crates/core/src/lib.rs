//! Exact p-ranks and Smith normal forms of classical 2-designs.
//!
//! The crate builds the incidence structures (projective and affine
//! geometries, cyclic difference sets, unitals), computes their invariant
//! factors by p-local elimination or by character sums in Galois rings, and
//! evaluates the closed-form predictions for the same quantities so the two
//! routes can be compared.
//!
//! Everything here is `no_std` with `alloc`; file formats, JSON records and
//! the command line live in the `designrank` crate.

#![no_std]
#![allow(clippy::needless_range_loop, clippy::many_single_char_names)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod algebra;
pub mod arith;
pub mod charsnf;
pub mod diffsets;
mod error;
pub mod formulas;
pub mod geometry;
pub mod snf;
pub mod unitals;

pub use error::{Error, Result};
pub use geometry::{DesignParams, IncidenceMatrix};
pub use snf::{InvariantFactorMultiset, ValuationProfile};
