//! Galois connections induced by finite relations, and the sieve/presheaf
//! duality that yields the finest topology making given presheaves sheaves.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::category::FiniteCategory;
use crate::error::{Error, Result};
use crate::presheaf::{satisfies_sheaf_condition, Presheaf};
use crate::sieve::{all_sieves, Sieve};
use crate::topology::{same_base, Topology};

/// Largest carrier whose subsets are enumerated.
pub const GALOIS_GUARD: usize = 20;

pub type Subset = BTreeSet<usize>;

/// A relation between `0..left` and `0..right`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteRelation {
    pub left_labels: Vec<String>,
    pub right_labels: Vec<String>,
    holds: Vec<Vec<bool>>,
}

impl FiniteRelation {
    pub fn new(left: usize, right: usize, holds: impl Fn(usize, usize) -> bool) -> Self {
        let labels = |n: usize| (0..n).map(|i| i.to_string()).collect();
        FiniteRelation {
            left_labels: labels(left),
            right_labels: labels(right),
            holds: (0..left).map(|t| (0..right).map(|s| holds(t, s)).collect()).collect(),
        }
    }

    pub fn with_labels(mut self, left: Vec<String>, right: Vec<String>) -> Result<Self> {
        if left.len() != self.left_len() || right.len() != self.right_len() {
            return Err(Error::IndexOutOfRange { index: left.len().max(right.len()), len: self.left_len().max(self.right_len()) });
        }
        self.left_labels = left;
        self.right_labels = right;
        Ok(self)
    }

    pub fn equality(n: usize) -> Self {
        Self::new(n, n, |a, b| a == b)
    }

    pub fn left_len(&self) -> usize {
        self.left_labels.len()
    }

    pub fn right_len(&self) -> usize {
        self.right_labels.len()
    }

    pub fn holds(&self, t: usize, s: usize) -> bool {
        self.holds[t][s]
    }

    pub fn full_left(&self) -> Subset {
        (0..self.left_len()).collect()
    }

    pub fn full_right(&self) -> Subset {
        (0..self.right_len()).collect()
    }

    /// Boolean matrix with row and column labels.
    pub fn dump(&self) -> String {
        let width = self.left_labels.iter().map(String::len).max().unwrap_or(0);
        let mut out = format!("{:width$} |", "");
        for s in &self.right_labels {
            let _ = write!(out, " {s}");
        }
        out.push('\n');
        for (t, row) in self.holds.iter().enumerate() {
            let _ = write!(out, "{:width$} |", self.left_labels[t]);
            for (s, &h) in row.iter().enumerate() {
                let cell = if h { "1" } else { "0" };
                let _ = write!(out, " {cell:>w$}", w = self.right_labels[s].len());
            }
            out.push('\n');
        }
        out
    }
}

fn check_subset(j: &Subset, len: usize) -> Result<()> {
    match j.iter().find(|&&e| e >= len) {
        Some(&element) => Err(Error::NotInCarrier { element, len }),
        None => Ok(()),
    }
}

/// `F(J) = { s | t R s for all t ∈ J }`.
pub fn galois_f(r: &FiniteRelation, j: &Subset) -> Result<Subset> {
    check_subset(j, r.left_len())?;
    Ok((0..r.right_len()).filter(|&s| j.iter().all(|&t| r.holds(t, s))).collect())
}

/// `G(I) = { t | t R s for all s ∈ I }`.
pub fn galois_g(r: &FiniteRelation, i: &Subset) -> Result<Subset> {
    check_subset(i, r.right_len())?;
    Ok((0..r.left_len()).filter(|&t| i.iter().all(|&s| r.holds(t, s))).collect())
}

/// `G(F(J))`, the least fixed point above `J`.
pub fn galois_closure(r: &FiniteRelation, j: &Subset) -> Result<Subset> {
    galois_g(r, &galois_f(r, j)?)
}

/// Fixed subsets on both sides, paired by `F`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPoints {
    pub left: Vec<Subset>,
    pub right: Vec<Subset>,
    /// `(i, k)` with `F(left[i]) = right[k]`.
    pub pairing: Vec<(usize, usize)>,
}

fn subsets(n: usize) -> impl Iterator<Item = Subset> {
    (0u32..1 << n).map(move |mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
}

/// Enumerates subsets in bitmask order on both carriers.
pub fn galois_fixed_points(r: &FiniteRelation, guard: usize) -> Result<FixedPoints> {
    let bound = guard.min(GALOIS_GUARD);
    let needed = r.left_len().max(r.right_len());
    if needed > bound {
        return Err(Error::GuardExceeded { what: "subset enumeration", needed, bound });
    }
    let mut left = Vec::new();
    for j in subsets(r.left_len()) {
        if galois_closure(r, &j)? == j {
            left.push(j);
        }
    }
    let mut right = Vec::new();
    for i in subsets(r.right_len()) {
        if galois_f(r, &galois_g(r, &i)?)? == i {
            right.push(i);
        }
    }
    let mut pairing = Vec::new();
    for (a, j) in left.iter().enumerate() {
        let image = galois_f(r, j)?;
        let k = right.iter().position(|i| *i == image).expect("F of a fixed point is fixed");
        pairing.push((a, k));
    }
    Ok(FixedPoints { left, right, pairing })
}

/// The relation "every pullback of the sieve satisfies the sheaf condition
/// for the presheaf", with all sieves of `c` on the left.
#[derive(Clone, Debug)]
pub struct SieveRelation {
    pub base: Arc<FiniteCategory>,
    pub sieves: Vec<Sieve>,
    pub relation: FiniteRelation,
}

pub fn sieve_presheaf_relation(c: &Arc<FiniteCategory>, ps: &[Presheaf], guard: usize) -> Result<SieveRelation> {
    if ps.iter().any(|p| !same_base(p.base(), c)) {
        return Err(Error::BaseMismatch);
    }
    let sieves: Vec<Sieve> = c.object_ids().flat_map(|x| all_sieves(c, x)).collect();
    if sieves.len() > guard {
        return Err(Error::GuardExceeded { what: "sieve carrier", needed: sieves.len(), bound: guard });
    }
    let table: Vec<Vec<bool>> = sieves
        .iter()
        .map(|s| {
            ps.iter()
                .map(|p| c.hom_into(s.at()).iter().all(|&x| satisfies_sheaf_condition(p, &s.pullback_unchecked(c, x))))
                .collect()
        })
        .collect();
    let relation = FiniteRelation::new(sieves.len(), ps.len(), |t, s| table[t][s]).with_labels(
        sieves.iter().map(|s| s.describe(c)).collect(),
        (0..ps.len()).map(|i| format!("P{i}")).collect(),
    )?;
    Ok(SieveRelation { base: c.clone(), sieves, relation })
}

/// The sieves related to every listed presheaf, as a covering system.
pub fn finest_topology_for(c: &Arc<FiniteCategory>, ps: &[Presheaf], guard: usize) -> Result<Topology> {
    let r = sieve_presheaf_relation(c, ps, guard)?;
    let covering = galois_g(&r.relation, &r.relation.full_right())?;
    Topology::new(c.clone(), covering.into_iter().map(|i| r.sieves[i].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::presheaf::is_sheaf;
    use crate::topology::{check_topology, enumerate_topology, stable_notion, DEFAULT_GUARD};

    fn set(xs: &[usize]) -> Subset {
        xs.iter().copied().collect()
    }

    #[test]
    fn operator_examples() {
        let r = FiniteRelation::equality(3);
        assert_eq!(galois_f(&r, &set(&[])).unwrap(), r.full_right());
        assert_eq!(galois_g(&r, &set(&[])).unwrap(), r.full_left());
        assert_eq!(galois_f(&r, &set(&[1])).unwrap(), set(&[1]));
        assert_eq!(galois_f(&r, &set(&[1, 2])).unwrap(), set(&[]));
        assert_eq!(galois_closure(&r, &set(&[1])).unwrap(), set(&[1]));
        assert!(matches!(galois_f(&r, &set(&[3])), Err(Error::NotInCarrier { element: 3, len: 3 })));

        let full = FiniteRelation::new(3, 2, |_, _| true);
        for j in subsets(3) {
            assert_eq!(galois_f(&full, &j).unwrap(), full.full_right());
            assert_eq!(galois_closure(&full, &j).unwrap(), full.full_left());
        }
    }

    #[test]
    fn fixed_point_examples() {
        let full = FiniteRelation::new(3, 2, |_, _| true);
        let fp = galois_fixed_points(&full, GALOIS_GUARD).unwrap();
        assert_eq!((fp.left.len(), fp.right.len()), (1, 1));

        // Equality on n: every singleton, the empty set and the whole
        // carrier are closed; nothing else.
        let eq = FiniteRelation::equality(3);
        let fp = galois_fixed_points(&eq, GALOIS_GUARD).unwrap();
        assert_eq!(fp.left, vec![set(&[]), set(&[0]), set(&[1]), set(&[2]), set(&[0, 1, 2])]);
        assert_eq!(fp.pairing.len(), fp.left.len());

        let empty = FiniteRelation::new(2, 2, |_, _| false);
        let fp = galois_fixed_points(&empty, GALOIS_GUARD).unwrap();
        assert_eq!(fp.left, vec![set(&[]), set(&[0, 1])]);
        assert_eq!(fp.right, vec![set(&[]), set(&[0, 1])]);
        assert_eq!(fp.pairing, vec![(0, 1), (1, 0)]);

        let big = FiniteRelation::new(21, 1, |_, _| true);
        assert!(matches!(galois_fixed_points(&big, 100), Err(Error::GuardExceeded { .. })));
    }

    #[test]
    fn sieve_relation_examples() {
        let sq = fixtures::square2();
        let t = sq.object("t").unwrap();
        let x1 = sq.object("x1").unwrap();
        let ps = [Presheaf::terminal(sq.clone()), Presheaf::representable(sq.clone(), x1)];
        let r = sieve_presheaf_relation(&sq, &ps, DEFAULT_GUARD).unwrap();
        for (i, s) in r.sieves.iter().enumerate() {
            if s.is_maximal(&sq) {
                assert!(r.relation.holds(i, 0) && r.relation.holds(i, 1));
            }
        }
        let s12 = r.sieves.iter().position(|s| *s == fixtures::s12(&sq)).unwrap();
        assert!(r.relation.holds(s12, 0));
        assert!(r.relation.holds(s12, 1));
        assert!(r.relation.dump().contains("P1"));
        let empty_t = r.sieves.iter().position(|s| *s == Sieve::empty(&sq, t)).unwrap();
        assert!(r.relation.holds(empty_t, 0));
        let r = sieve_presheaf_relation(&sq, &[Presheaf::empty(sq.clone())], DEFAULT_GUARD).unwrap();
        assert!(!r.relation.holds(empty_t, 0));
    }

    #[test]
    fn finest_topology_examples() {
        let sq = fixtures::square2();
        let reps: Vec<Presheaf> = sq.object_ids().map(|x| Presheaf::representable(sq.clone(), x)).collect();
        let j = finest_topology_for(&sq, &reps, DEFAULT_GUARD).unwrap();
        assert!(check_topology(&j).is_empty());
        let s12 = enumerate_topology(&stable_notion(&sq, &[fixtures::s12(&sq)]).unwrap());
        assert!(s12.is_subset(&j));
        for p in &reps {
            assert!(is_sheaf(p, &j).unwrap());
        }

        let arrow = fixtures::arrow();
        let j = finest_topology_for(&arrow, &[Presheaf::terminal(arrow.clone())], DEFAULT_GUARD).unwrap();
        assert!(check_topology(&j).is_empty());
        assert_eq!(finest_topology_for(&arrow, &[], DEFAULT_GUARD).unwrap(), Topology::degenerate(arrow));
    }
}
