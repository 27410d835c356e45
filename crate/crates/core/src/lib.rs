//! Single-class genera of positive definite integral lattices.
//!
//! The crate enumerates, constructs and certifies all genera of primitive
//! positive definite integral lattices of rank 3 to 10 that contain exactly
//! one isometry class. Arithmetic is exact throughout; floating point only
//! appears inside outward-rounded enclosures used for pruning bounds.

pub mod arith;
pub mod classify;
pub mod construct;
pub mod aut;
pub mod error;
pub mod genus;
pub mod lattice;
pub mod mass;
pub mod padic;
pub mod tables;
pub mod watson;

pub use error::{Error, Result};
pub use lattice::GramLattice;
