//! Meets, joins and Heyting implication of topologies on a fixed category.
//!
//! Topologies are ordered by inclusion of covering sets; the corresponding
//! subtoposes are ordered the other way round.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::sieve::{all_sieves, Sieve};
use crate::topology::{enumerate_topology, StableNotion, Topology};

fn common_base<'a>(ts: &'a [Topology], what: &'static str) -> Result<&'a Topology> {
    let first = ts.first().ok_or(Error::EmptyList(what))?;
    for t in &ts[1..] {
        first.check_same_base(t)?;
    }
    Ok(first)
}

/// Per-object intersection of covering sets.
pub fn meet_topologies(ts: &[Topology]) -> Result<Topology> {
    let first = common_base(ts, "meet")?;
    let c = first.base();
    let covering = c
        .object_ids()
        .map(|x| {
            first.covering_at(x).iter().filter(|s| ts.iter().all(|t| t.covering_at(x).contains(s))).cloned().collect()
        })
        .collect();
    Ok(Topology::from_sets(c.clone(), covering))
}

/// The smallest topology containing every input.
pub fn join_topologies(ts: &[Topology]) -> Result<Topology> {
    let first = common_base(ts, "join")?;
    let gens: Vec<Sieve> = ts.iter().flat_map(|t| t.sieves().cloned()).collect();
    Ok(enumerate_topology(&StableNotion::new(first.base().clone(), gens)?))
}

/// `J₁ ⇒ J₂`: `C` covers when, for every `x : X′ → X`, every `J₁`-covering
/// sieve containing `x* C` is `J₂`-covering.
pub fn implication_topology(j1: &Topology, j2: &Topology) -> Result<Topology> {
    j1.check_same_base(j2)?;
    let c = j1.base();
    let covering = c
        .object_ids()
        .map(|x| {
            all_sieves(c, x)
                .into_iter()
                .filter(|s| {
                    c.hom_into(x).iter().all(|&f| {
                        let pulled = s.pullback_unchecked(c, f);
                        j1.covering_at(c.dom(f)).iter().filter(|w| pulled.is_subset(w)).all(|w| j2.covers(w))
                    })
                })
                .collect::<BTreeSet<Sieve>>()
        })
        .collect();
    Ok(Topology::from_sets(c.clone(), covering))
}

/// The topology presenting the subtopos difference; same as
/// [`implication_topology`].
pub fn subtopos_difference(j1: &Topology, j2: &Topology) -> Result<Topology> {
    implication_topology(j1, j2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::topology::{brute_force_generated, check_topology, stable_notion, DEFAULT_GUARD};

    #[test]
    fn meet_examples() {
        let arrow = fixtures::arrow();
        let su = Sieve::generated_by(&arrow, "b", &["u"]).unwrap();
        let j = enumerate_topology(&stable_notion(&arrow, &[su]).unwrap());
        let min = Topology::minimal(arrow.clone());
        assert_eq!(meet_topologies(&[j.clone(), j.clone()]).unwrap(), j);
        assert_eq!(meet_topologies(&[min.clone(), j.clone()]).unwrap(), min);
        assert!(matches!(meet_topologies(&[]), Err(Error::EmptyList(_))));
        assert!(matches!(meet_topologies(&[j, Topology::minimal(fixtures::vee())]), Err(Error::BaseMismatch)));
    }

    #[test]
    fn join_examples() {
        let arrow = fixtures::arrow();
        let su = Sieve::generated_by(&arrow, "b", &["u"]).unwrap();
        let j = enumerate_topology(&stable_notion(&arrow, &[su]).unwrap());
        assert_eq!(join_topologies(&[j.clone(), Topology::minimal(arrow.clone())]).unwrap(), j);
        assert_eq!(join_topologies(&[j.clone(), j.clone()]).unwrap(), j);

        let sq = fixtures::square2();
        let g1 = Sieve::generated_by(&sq, "t", &["x1->t"]).unwrap();
        let g2 = Sieve::generated_by(&sq, "t", &["x2->t"]).unwrap();
        let j1 = enumerate_topology(&stable_notion(&sq, &[g1.clone()]).unwrap());
        let j2 = enumerate_topology(&stable_notion(&sq, &[g2.clone()]).unwrap());
        let joined = join_topologies(&[j1, j2]).unwrap();
        assert!(joined.covers(&fixtures::s12(&sq)));
        assert!(joined.covers(&Sieve::generated_by(&sq, "t", &["o->t"]).unwrap()));
        assert_eq!(joined, brute_force_generated(&sq, &[g1, g2], DEFAULT_GUARD).unwrap());
    }

    #[test]
    fn implication_examples() {
        let arrow = fixtures::arrow();
        let su = Sieve::generated_by(&arrow, "b", &["u"]).unwrap();
        let j = enumerate_topology(&stable_notion(&arrow, &[su]).unwrap());
        let top = Topology::degenerate(arrow.clone());
        assert_eq!(implication_topology(&j, &j).unwrap(), top);
        assert_eq!(implication_topology(&top, &j).unwrap(), j);
        assert_eq!(implication_topology(&j, &top).unwrap(), top);
        assert_eq!(subtopos_difference(&top, &j).unwrap(), j);
        assert!(check_topology(&implication_topology(&j, &Topology::minimal(arrow)).unwrap()).is_empty());
    }
}
