//! Exact simulation of x ↦ βx + α mod 1 for algebraic β, with matching
//! detection, exact enumeration of matching intervals in α, and the
//! statistics built on top of them.

// Hashing and ordering of field elements ignore the lazily filled enclosure cache.
#![allow(clippy::mutable_key_type)]

pub mod checks;
pub mod dynamics;
pub mod fields;
pub mod multinacci;
pub mod numberfield;
pub mod paramsweep;
pub mod quadratic;
pub mod stats;
pub mod transitions;

pub use numberfield::{FieldElement, FieldError, NumberField};
