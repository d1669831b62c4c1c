//! Bundled fixture categories.
//!
//! * `arrow`: objects `a`, `b` and one arrow `u : a → b`.
//! * `vee`: the poset `w ≤ u`, `w ≤ v`.
//! * `square2`: opens of the two-point discrete space, `o ⊂ x1, x2 ⊂ t`.
//! * `idem`: one object `m` with an idempotent `e`.
//! * `elts`: elements of the presheaf on `arrow` with two points over each
//!   object and identity restriction, with its projection to `arrow`.

use std::sync::Arc;

use crate::category::{CategoryDoc, FiniteCategory};
use crate::functor::{FunctorDoc, FunctorMap};
use crate::sieve::{Presieve, Sieve};

fn load(text: &str) -> Arc<FiniteCategory> {
    let doc: CategoryDoc = serde_json::from_str(text).expect("fixture parses");
    Arc::new(FiniteCategory::from_doc(&doc).expect("fixture is a category"))
}

pub const ARROW_JSON: &str = include_str!("../fixtures/arrow.json");
pub const VEE_JSON: &str = include_str!("../fixtures/vee.json");
pub const SQUARE2_JSON: &str = include_str!("../fixtures/square2.json");
pub const IDEM_JSON: &str = include_str!("../fixtures/idem.json");
pub const ELTS_JSON: &str = include_str!("../fixtures/elts.json");
pub const ELTS_PROJECTION_JSON: &str = include_str!("../fixtures/elts_projection.json");

pub fn arrow() -> Arc<FiniteCategory> {
    load(ARROW_JSON)
}

pub fn vee() -> Arc<FiniteCategory> {
    load(VEE_JSON)
}

pub fn square2() -> Arc<FiniteCategory> {
    load(SQUARE2_JSON)
}

pub fn idem() -> Arc<FiniteCategory> {
    load(IDEM_JSON)
}

pub fn elts() -> Arc<FiniteCategory> {
    load(ELTS_JSON)
}

/// The projection `elts → arrow`.
pub fn elts_projection() -> FunctorMap {
    let doc: FunctorDoc = serde_json::from_str(ELTS_PROJECTION_JSON).expect("fixture parses");
    FunctorMap::from_doc(elts(), arrow(), &doc).expect("fixture is a functor")
}

/// Looks up a fixture by name (`arrow`, `vee`, `square2`, `idem`, `elts`).
pub fn by_name(name: &str) -> Option<Arc<FiniteCategory>> {
    match name {
        "arrow" => Some(arrow()),
        "vee" => Some(vee()),
        "square2" => Some(square2()),
        "idem" => Some(idem()),
        "elts" => Some(elts()),
        _ => None,
    }
}

/// The sieve on `t` in `square2` generated by the two points.
pub fn s12(c: &FiniteCategory) -> Sieve {
    let t = c.object("t").expect("square2 fixture");
    let members = ["x1->t", "x2->t"].map(|m| c.morphism(m).expect("square2 fixture"));
    Presieve::new(c, t, members).expect("square2 fixture").generate(c)
}
