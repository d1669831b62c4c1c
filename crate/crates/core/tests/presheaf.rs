mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use grotto::fixtures;
use grotto::presheaf::{
    all_subpresheaves, category_of_elements, close_subpresheaf, is_sheaf, matching_families, plus_construction, sheafify, MatchingFamily,
    Presheaf, PresheafDoc, SubPresheaf,
};
use grotto::topology::{enumerate_topology, stable_notion, Topology};
use grotto::{FiniteCategory, ObjId, Sieve};
use proptest::prelude::*;

use common::{random_family, random_presheaf, rng};

fn random_topology(c: &Arc<FiniteCategory>, seed: u64) -> Topology {
    enumerate_topology(&stable_notion(c, &random_family(c, &mut rng(seed), 3)).unwrap())
}

fn agree_on(a: &MatchingFamily, b: &MatchingFamily, t: &Sieve) -> bool {
    t.members().all(|f| a.value(f) == b.value(f))
}

/// Size of the colimit of matching families over all covering sieves of `x`,
/// two families being identified when they agree on a common covering sieve.
fn colimit_size(p: &Presheaf, j: &Topology, x: ObjId) -> usize {
    let covers: Vec<&Sieve> = j.covering_at(x).iter().collect();
    let all: Vec<MatchingFamily> = covers.iter().flat_map(|s| matching_families(p, s)).collect();
    let mut parent: Vec<usize> = (0..all.len()).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            i = parent[i];
        }
        i
    }
    for a in 0..all.len() {
        for b in a + 1..all.len() {
            let common = covers.iter().any(|t| t.is_subset(&all[a].over) && t.is_subset(&all[b].over) && agree_on(&all[a], &all[b], t));
            if common {
                let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    (0..all.len()).filter(|&i| root(&mut parent, i) == i).count()
}

fn locally_equal(p: &Presheaf, j: &Topology, x: ObjId, e: usize, e2: usize) -> bool {
    j.covering_at(x).iter().any(|s| s.members().all(|f| p.restrict(f, e) == p.restrict(f, e2)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn plus_matches_the_colimit(seed in any::<u64>()) {
        let sq = fixtures::square2();
        let j = random_topology(&sq, seed);
        let p = random_presheaf(&sq, &mut rng(seed ^ 0x55), 2);
        let plus = plus_construction(&p, &j).unwrap();
        for x in sq.object_ids() {
            prop_assert_eq!(plus.presheaf.size(x), colimit_size(&p, &j, x));
            for e in 0..p.size(x) {
                for e2 in 0..p.size(x) {
                    let same = plus.unit.apply(x, e) == plus.unit.apply(x, e2);
                    prop_assert_eq!(same, locally_equal(&p, &j, x, e, e2));
                }
            }
        }
    }

    #[test]
    fn sheafification_is_idempotent(seed in any::<u64>()) {
        let sq = fixtures::square2();
        let j = random_topology(&sq, seed);
        let p = random_presheaf(&sq, &mut rng(seed ^ 0xaa), 2);
        let a = sheafify(&p, &j).unwrap();
        prop_assert!(is_sheaf(&a.presheaf, &j).unwrap());
        let again = sheafify(&a.presheaf, &j).unwrap();
        prop_assert!(again.unit.is_iso());
        if is_sheaf(&p, &j).unwrap() {
            prop_assert!(a.unit.is_iso());
        }
    }

    #[test]
    fn subpresheaf_closure_is_a_closure(seed in any::<u64>()) {
        let vee = fixtures::vee();
        let j = stable_notion(&vee, &random_family(&vee, &mut rng(seed), 2)).unwrap();
        let p = random_presheaf(&vee, &mut rng(seed ^ 0x33), 2);
        let subs = all_subpresheaves(&p, 24).unwrap();
        for q in &subs {
            let cq = close_subpresheaf(q, &j).unwrap();
            prop_assert!(q.is_subset(&cq));
            prop_assert_eq!(&close_subpresheaf(&cq, &j).unwrap(), &cq);
            for r in subs.iter().filter(|r| q.is_subset(r)) {
                prop_assert!(cq.is_subset(&close_subpresheaf(r, &j).unwrap()));
            }
        }
    }
}

#[test]
fn docs_round_trip_through_json() {
    let sq = fixtures::square2();
    let mut r = rng(3);
    for _ in 0..20 {
        let p = random_presheaf(&sq, &mut r, 2);
        let text = serde_json::to_string(&p.to_doc()).unwrap();
        let doc: PresheafDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(Presheaf::from_doc(sq.clone(), &doc).unwrap(), p);
    }
}

#[test]
fn s12_is_subcanonical() {
    let sq = fixtures::square2();
    let j = enumerate_topology(&stable_notion(&sq, &[fixtures::s12(&sq)]).unwrap());
    let verdicts: BTreeMap<String, bool> =
        sq.object_ids().map(|x| (sq.object_name(x).to_string(), is_sheaf(&Presheaf::representable(sq.clone(), x), &j).unwrap())).collect();
    assert!(verdicts.values().all(|&v| v));
}

#[test]
fn elements_of_representables() {
    for c in [fixtures::arrow(), fixtures::vee(), fixtures::square2()] {
        for x in c.object_ids() {
            let p = Presheaf::representable(c.clone(), x);
            let (elts, proj) = category_of_elements(&p).unwrap();
            let total: usize = p.sizes().iter().sum();
            assert_eq!(elts.object_count(), total);
            assert!(proj.violations().is_empty());
        }
    }
}

#[test]
fn sieves_are_subpresheaves_of_representables() {
    let sq = fixtures::square2();
    for x in sq.object_ids() {
        for s in grotto::sieve::all_sieves(&sq, x) {
            let q = SubPresheaf::of_sieve(&sq, &s);
            assert_eq!(q.is_full(), s.is_maximal(&sq));
            let count: usize = sq.object_ids().map(|y| q.chosen(y).len()).sum();
            assert_eq!(count, s.len());
        }
    }
}
