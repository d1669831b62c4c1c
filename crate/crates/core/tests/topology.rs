mod common;

use grotto::fixtures;
use grotto::sieve::{all_sieves, sieve_count};
use grotto::topology::{
    check_topology, covers_generated, enumerate_topology, pullback_multicovering, saturate_generated, stable_notion, tree_covers,
    validate_certificate, validate_multicovering, TopologyDoc, TopologySpace, TreeOutcome, DEFAULT_GUARD,
};
use grotto::Presieve;
use proptest::prelude::*;

use common::{every_sieve, random_family, rng};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_topologies_satisfy_the_axioms(seed in any::<u64>()) {
        for c in [fixtures::square2(), fixtures::idem(), fixtures::elts()] {
            let gens = random_family(&c, &mut rng(seed), 3);
            let t = enumerate_topology(&stable_notion(&c, &gens).unwrap());
            prop_assert!(check_topology(&t).is_empty());
            prop_assert!(gens.iter().all(|g| t.covers(g)));
            prop_assert_eq!(&t, &saturate_generated(&c, &gens).unwrap());
        }
    }

    #[test]
    fn brute_force_is_the_least_topology(seed in any::<u64>()) {
        let sq = fixtures::square2();
        let space = TopologySpace::new(sq.clone(), DEFAULT_GUARD).unwrap();
        let gens = random_family(&sq, &mut rng(seed), 3);
        let least = space.generated(&gens).unwrap();
        for t in space.topologies() {
            if gens.iter().all(|g| t.covers(g)) {
                prop_assert!(least.is_subset(&t));
            }
        }
    }

    #[test]
    fn certificates_validate_and_pull_back(seed in any::<u64>()) {
        let sq = fixtures::square2();
        let j = stable_notion(&sq, &random_family(&sq, &mut rng(seed), 3)).unwrap();
        for s in every_sieve(&sq) {
            let outcome = tree_covers(&j, &s, sieve_count(&sq));
            prop_assert_eq!(outcome.is_covered(), covers_generated(&j, &s));
            if let TreeOutcome::Covered(cert) = outcome {
                prop_assert!(validate_certificate(&j, &Presieve::from(&s), &cert).is_empty());
                for &f in sq.hom_into(s.at()) {
                    let (pulled, _) = pullback_multicovering(&j, &cert.covering, f).unwrap();
                    prop_assert!(validate_multicovering(&j, &pulled).is_empty());
                }
            }
        }
    }
}

#[test]
fn generated_topology_is_monotone_in_generators() {
    let sq = fixtures::square2();
    let mut r = rng(11);
    for _ in 0..50 {
        let small = random_family(&sq, &mut r, 2);
        let mut big = small.clone();
        big.extend(random_family(&sq, &mut r, 2));
        let a = enumerate_topology(&stable_notion(&sq, &small).unwrap());
        let b = enumerate_topology(&stable_notion(&sq, &big).unwrap());
        assert!(a.is_subset(&b));
    }
}

#[test]
fn topology_files_round_trip() {
    for c in [fixtures::arrow(), fixtures::vee(), fixtures::square2()] {
        let mut r = rng(12);
        let gens = random_family(&c, &mut r, 3);
        let t = enumerate_topology(&stable_notion(&c, &gens).unwrap());
        for doc in [TopologyDoc::from_generators(&c, &gens), TopologyDoc::from_topology(&t)] {
            let text = serde_json::to_string_pretty(&doc).unwrap();
            let back: TopologyDoc = serde_json::from_str(&text).unwrap();
            assert_eq!(enumerate_topology(&back.to_notion(&c).unwrap()), t);
        }
    }
}

#[test]
fn sieve_counts_of_fixtures() {
    let counts: Vec<usize> = [fixtures::arrow(), fixtures::vee(), fixtures::square2()].iter().map(|c| sieve_count(c)).collect();
    assert_eq!(counts[0], 5);
    assert_eq!(counts[2], 14);
    let vee = fixtures::vee();
    assert_eq!(counts[1], vee.object_ids().map(|x| all_sieves(&vee, x).len()).sum::<usize>());
}
