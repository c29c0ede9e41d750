//! Finite fields with log tables, finite-precision Galois rings, and roots
//! of unity in them.

mod field;
mod galois_ring;
mod roots;

pub use field::{FieldTables, FiniteField, FIELD_SIZE_LIMIT};
pub use galois_ring::{GaloisRing, GaloisRingElement};
pub use roots::{RootsOfUnity, TABLE_FREE_LIMIT};
