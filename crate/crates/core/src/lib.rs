//! Grothendieck topologies, sheaves and geometric-logic proof search on
//! explicit finite sites.

pub mod category;
pub mod constructions;
pub mod error;
pub mod fixtures;
pub mod functor;
pub mod galois;
pub mod geolog;
pub mod lattice;
pub mod presheaf;
pub mod sieve;
pub mod topology;
pub mod transport;

pub use category::{validate_category, CategoryDoc, CategoryViolation, FiniteCategory, MorId, ObjId};
pub use error::{Error, Result};
pub use functor::{FunctorDoc, FunctorMap};
pub use sieve::{Presieve, Sieve, SieveDoc, SieveLike};
