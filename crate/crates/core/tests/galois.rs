use std::collections::BTreeSet;

use grotto::fixtures;
use grotto::galois::{finest_topology_for, galois_closure, galois_f, galois_fixed_points, galois_g, FiniteRelation, Subset};
use grotto::presheaf::{is_sheaf, Presheaf};
use grotto::topology::{all_topologies, DEFAULT_GUARD};
use grotto::Error;
use proptest::prelude::*;

fn relation() -> impl Strategy<Value = FiniteRelation> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(l, r)| {
        proptest::collection::vec(any::<bool>(), l * r).prop_map(move |bits| FiniteRelation::new(l, r, |t, s| bits[t * r + s]))
    })
}

fn subset_of(n: usize) -> impl Strategy<Value = Subset> {
    proptest::collection::btree_set(0..n, 0..=n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn closure_is_a_closure_operator(r in relation(), seed in any::<u64>()) {
        let n = r.left_len();
        let j: Subset = (0..n).filter(|i| seed >> i & 1 == 1).collect();
        let k: Subset = (0..n).filter(|i| seed >> (i + 8) & 1 == 1).collect();
        let cj = galois_closure(&r, &j).unwrap();
        prop_assert!(j.is_subset(&cj));
        prop_assert_eq!(&galois_closure(&r, &cj).unwrap(), &cj);
        if j.is_subset(&k) {
            prop_assert!(cj.is_subset(&galois_closure(&r, &k).unwrap()));
        }
    }

    #[test]
    fn fixed_points_pair_bijectively(r in relation()) {
        let fp = galois_fixed_points(&r, 20).unwrap();
        prop_assert_eq!(fp.left.len(), fp.right.len());
        let targets: BTreeSet<usize> = fp.pairing.iter().map(|&(_, k)| k).collect();
        prop_assert_eq!(targets.len(), fp.right.len());
        for &(i, k) in &fp.pairing {
            prop_assert_eq!(&galois_g(&r, &fp.right[k]).unwrap(), &fp.left[i]);
        }
    }

    #[test]
    fn f_turns_unions_into_intersections(r in relation(), a in subset_of(6), b in subset_of(6)) {
        let n = r.left_len();
        let a: Subset = a.into_iter().filter(|&i| i < n).collect();
        let b: Subset = b.into_iter().filter(|&i| i < n).collect();
        let union: Subset = a.union(&b).copied().collect();
        let fa = galois_f(&r, &a).unwrap();
        let fb = galois_f(&r, &b).unwrap();
        prop_assert_eq!(galois_f(&r, &union).unwrap(), fa.intersection(&fb).copied().collect::<Subset>());
    }
}

#[test]
fn out_of_range_elements_are_errors() {
    let r = FiniteRelation::equality(3);
    assert!(matches!(galois_f(&r, &Subset::from([3])), Err(Error::NotInCarrier { .. })));
    assert!(matches!(galois_fixed_points(&FiniteRelation::equality(21), 30), Err(Error::GuardExceeded { .. })));
}

#[test]
fn finest_topology_is_the_largest_for_which_the_list_are_sheaves() {
    for c in [fixtures::arrow(), fixtures::vee()] {
        let ps: Vec<Presheaf> = c.object_ids().map(|x| Presheaf::representable(c.clone(), x)).collect();
        let finest = finest_topology_for(&c, &ps, DEFAULT_GUARD).unwrap();
        for j in all_topologies(&c, DEFAULT_GUARD).unwrap() {
            let all_sheaves = ps.iter().all(|p| is_sheaf(p, &j).unwrap());
            assert_eq!(all_sheaves, j.is_subset(&finest));
        }
    }
}
