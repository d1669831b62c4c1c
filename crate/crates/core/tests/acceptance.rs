//! Acceptance suite: one verdict line per criterion.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use grotto::constructions::product_category;
use grotto::fixtures;
use grotto::galois::{finest_topology_for, galois_f, galois_fixed_points, galois_g, FiniteRelation, Subset};
use grotto::geolog::prover::{prove_bounded, DEFAULT_CONTEXT_BOUND};
use grotto::geolog::semantics::{carrier_vectors, eval_ast_tuples, for_each_model, graph_model};
use grotto::geolog::syntax::infer_context;
use grotto::geolog::{
    eval_formula, find_countermodel, holds_in_model, parse_formula, relationalize, ProofOutcome, Sequent, Signature,
};
use grotto::lattice::{implication_topology, join_topologies, meet_topologies};
use grotto::presheaf::{
    close_subpresheaf, is_separated, is_sheaf, plus_construction, presheaf_morphisms, sheafify, tree_close_membership, Presheaf,
    SubPresheaf,
};
use grotto::sieve::sieve_count;
use grotto::topology::{
    all_topologies, brute_force_generated, check_topology, close_sieve, covers_generated, enumerate_topology, saturate_generated,
    stable_notion, tree_covers, Topology, TopologySpace, DEFAULT_GUARD,
};
use grotto::transport::{
    check_fibration, extraordinary_image, generic_inverse_image, giraud_topology, induced_product_notion, product_join_covers,
};
use grotto::{FiniteCategory, Presieve, Sieve};
use rand::Rng;

use common::{every_sieve, random_family, random_presheaf, random_vocabulary, rng, small_presheaves, subfamily};

type Verdict = Result<String, String>;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn within(start: Instant, limit: u64) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took < Duration::from_secs(limit), || format!("took {:.1}s, limit {limit}s", took.as_secs_f64()))?;
    Ok(took)
}

fn generation_agreement() -> Verdict {
    let start = Instant::now();
    let mut checks = 0;
    for c in [fixtures::arrow(), fixtures::vee()] {
        let pool = every_sieve(&c);
        let depth = sieve_count(&c) + 1;
        for mask in 0..1u32 << pool.len() {
            let gens = subfamily(&pool, mask);
            let j = stable_notion(&c, &gens).map_err(|e| e.to_string())?;
            let brute = brute_force_generated(&c, &gens, DEFAULT_GUARD).map_err(|e| e.to_string())?;
            for s in &pool {
                let (a, b, t) = (covers_generated(&j, s), brute.covers(s), tree_covers(&j, s, depth).is_covered());
                ensure(a == b && b == t, || format!("disagreement on {} with family {mask:#b}", s.describe(&c)))?;
                checks += 1;
            }
        }
    }
    let sq = fixtures::square2();
    let space = TopologySpace::new(sq.clone(), DEFAULT_GUARD).map_err(|e| e.to_string())?;
    let pool = every_sieve(&sq);
    let depth = sieve_count(&sq) + 1;
    let mut r = rng(1);
    for _ in 0..200 {
        let gens = random_family(&sq, &mut r, 3);
        let j = stable_notion(&sq, &gens).map_err(|e| e.to_string())?;
        let brute = space.generated(&gens).map_err(|e| e.to_string())?;
        for s in &pool {
            let (a, b, t) = (covers_generated(&j, s), brute.covers(s), tree_covers(&j, s, depth).is_covered());
            ensure(a == b && b == t, || format!("SQUARE2 disagreement on {}", s.describe(&sq)))?;
            checks += 1;
        }
    }
    let took = within(start, 60)?;
    Ok(format!("{checks} verdict triples agree, {:.2}s", took.as_secs_f64()))
}

fn closure_laws_at(j: &Topology, s: &Sieve, t: &Sieve) -> Result<(), String> {
    let c = j.base();
    let cs = close_sieve(j, s);
    let direct: BTreeSet<_> = c.hom_into(s.at()).iter().copied().filter(|&f| j.covers(&s.pullback(c, f).unwrap())).collect();
    ensure(cs.members().collect::<BTreeSet<_>>() == direct, || "closure differs from its pointwise definition".into())?;
    ensure(s.is_subset(&cs), || "closure is not extensive".into())?;
    ensure(close_sieve(j, &cs) == cs, || "closure is not idempotent".into())?;
    if s.at() == t.at() && s.is_subset(t) {
        ensure(cs.is_subset(&close_sieve(j, t)), || "closure is not monotone".into())?;
    }
    for &f in c.hom_into(s.at()) {
        let lhs = close_sieve(j, &s.pullback(c, f).unwrap());
        ensure(lhs == cs.pullback(c, f).unwrap(), || "closure does not commute with pullback".into())?;
    }
    Ok(())
}

fn closure_laws() -> Verdict {
    let mut checks = 0;
    for c in [fixtures::arrow(), fixtures::vee()] {
        let pool = every_sieve(&c);
        for j in all_topologies(&c, DEFAULT_GUARD).map_err(|e| e.to_string())? {
            for s in &pool {
                for t in pool.iter().filter(|t| t.at() == s.at()) {
                    closure_laws_at(&j, s, t)?;
                    checks += 1;
                }
            }
        }
    }
    let sq = fixtures::square2();
    let pool = every_sieve(&sq);
    let mut r = rng(2);
    for _ in 0..200 {
        let gens = random_family(&sq, &mut r, 3);
        let j = enumerate_topology(&stable_notion(&sq, &gens).map_err(|e| e.to_string())?);
        let s = &pool[r.gen_range(0..pool.len())];
        let same: Vec<&Sieve> = pool.iter().filter(|t| t.at() == s.at()).collect();
        let t = same[r.gen_range(0..same.len())];
        let lo = s.meet(t).unwrap();
        closure_laws_at(&j, &lo, s)?;
        closure_laws_at(&j, s, t)?;
        checks += 2;
    }
    Ok(format!("{checks} closure checks, zero violations"))
}

fn heyting() -> Verdict {
    let start = Instant::now();
    let mut triples = 0;
    for c in [fixtures::arrow(), fixtures::vee()] {
        let ts = all_topologies(&c, DEFAULT_GUARD).map_err(|e| e.to_string())?;
        for j1 in &ts {
            for j2 in &ts {
                let imp = implication_topology(j1, j2).map_err(|e| e.to_string())?;
                for k in &ts {
                    let meet = meet_topologies(&[j1.clone(), k.clone()]).map_err(|e| e.to_string())?;
                    ensure(meet.is_subset(j2) == k.is_subset(&imp), || "adjunction fails".into())?;
                    let lhs = meet_topologies(&[j1.clone(), join_topologies(&[j2.clone(), k.clone()]).unwrap()]).unwrap();
                    let rhs = join_topologies(&[
                        meet_topologies(&[j1.clone(), j2.clone()]).unwrap(),
                        meet_topologies(&[j1.clone(), k.clone()]).unwrap(),
                    ])
                    .unwrap();
                    ensure(lhs == rhs, || "meet does not distribute over join".into())?;
                    triples += 1;
                }
            }
        }
    }
    let took = within(start, 30)?;
    Ok(format!("{triples} triples, {:.2}s", took.as_secs_f64()))
}

fn subsets(n: usize) -> Vec<Subset> {
    (0u32..1 << n).map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect()).collect()
}

fn galois_laws(r: &FiniteRelation) -> Result<(), String> {
    let (lefts, rights) = (subsets(r.left_len()), subsets(r.right_len()));
    let f = |j: &Subset| galois_f(r, j).unwrap();
    let g = |i: &Subset| galois_g(r, i).unwrap();
    for j in &lefts {
        for i in &rights {
            ensure(j.is_subset(&g(i)) == i.is_subset(&f(j)), || "adjunction fails".into())?;
        }
        ensure(f(&g(&f(j))) == f(j), || "F∘G∘F ≠ F".into())?;
    }
    for i in &rights {
        ensure(g(&f(&g(i))) == g(i), || "G∘F∘G ≠ G".into())?;
    }
    let fixed = galois_fixed_points(r, 20).map_err(|e| e.to_string())?;
    let images_left: BTreeSet<Subset> = rights.iter().map(g).collect();
    let images_right: BTreeSet<Subset> = lefts.iter().map(f).collect();
    ensure(fixed.left.iter().cloned().collect::<BTreeSet<_>>() == images_left, || "left fixed points are not the images".into())?;
    ensure(fixed.right.iter().cloned().collect::<BTreeSet<_>>() == images_right, || "right fixed points are not the images".into())
}

fn fixture_presheaf_lists(c: &Arc<FiniteCategory>) -> Vec<Vec<Presheaf>> {
    let reps: Vec<Presheaf> = c.object_ids().map(|x| Presheaf::representable(c.clone(), x)).collect();
    let mut lists = vec![vec![Presheaf::terminal(c.clone())], vec![Presheaf::empty(c.clone())], reps.clone()];
    lists.push(small_presheaves(c, 1));
    lists.extend(reps.into_iter().map(|p| vec![p]));
    lists
}

fn galois_suite() -> Verdict {
    let mut relations = 0;
    for l in 0..=3 {
        for rr in 0..=3 {
            for mask in 0u32..1 << (l * rr) {
                galois_laws(&FiniteRelation::new(l, rr, |t, s| mask >> (t * rr + s) & 1 == 1))?;
                relations += 1;
            }
        }
    }
    let mut r = rng(4);
    for _ in 0..100 {
        let (l, rr) = (r.gen_range(1..=6), r.gen_range(1..=6));
        let p = r.gen_range(0.2..0.9);
        let table: Vec<Vec<bool>> = (0..l).map(|_| (0..rr).map(|_| r.gen_bool(p)).collect()).collect();
        galois_laws(&FiniteRelation::new(l, rr, |t, s| table[t][s]))?;
        relations += 1;
    }
    let mut lists = 0;
    for c in [fixtures::arrow(), fixtures::vee(), fixtures::square2(), fixtures::idem()] {
        for ps in fixture_presheaf_lists(&c) {
            let t = finest_topology_for(&c, &ps, DEFAULT_GUARD).map_err(|e| e.to_string())?;
            ensure(check_topology(&t).is_empty(), || "finest topology fails the axioms".into())?;
            for p in &ps {
                ensure(is_sheaf(p, &t).unwrap(), || "a listed presheaf is not a sheaf".into())?;
            }
            lists += 1;
        }
    }
    Ok(format!("{relations} relations, {lists} presheaf lists"))
}

fn giraud() -> Verdict {
    let w = check_fibration(&fixtures::elts_projection()).map_err(|e| format!("{e:?}"))?;
    let base = all_topologies(w.base(), DEFAULT_GUARD).map_err(|e| e.to_string())?;
    let total = all_topologies(w.total(), DEFAULT_GUARD).map_err(|e| e.to_string())?;
    let giraud: Vec<Topology> = base.iter().map(|j| giraud_topology(&w, j)).collect();
    for (j, gj) in base.iter().zip(&giraud) {
        ensure(*gj == generic_inverse_image(&w, j).map_err(|e| e.to_string())?, || "Giraud and generic inverse image differ".into())?;
    }
    let mut adjunction = 0;
    for (j, gj) in base.iter().zip(&giraud) {
        for k in total.iter().filter(|k| gj.is_subset(k)) {
            let gens: Vec<Sieve> = k.sieves().cloned().collect();
            let ext = extraordinary_image(&w, j, &gens).map_err(|e| e.to_string())?;
            for (j1, gj1) in base.iter().zip(&giraud).filter(|(j1, _)| j.is_subset(j1)) {
                ensure(ext.is_subset(j1) == k.is_subset(gj1), || "extraordinary image is not left adjoint".into())?;
                adjunction += 1;
            }
        }
    }
    for (a, ga) in base.iter().zip(&giraud) {
        for (b, gb) in base.iter().zip(&giraud) {
            let lhs = giraud_topology(&w, &join_topologies(&[a.clone(), b.clone()]).unwrap());
            ensure(lhs == join_topologies(&[ga.clone(), gb.clone()]).unwrap(), || "inverse image does not preserve a join".into())?;
        }
    }
    Ok(format!("{} base topologies, {adjunction} adjunction instances", base.len()))
}

fn terminal_like(p: &Presheaf) -> bool {
    p.sizes().iter().all(|&n| n == 1)
}

fn universal_property(p: &Presheaf, j: &Topology, sheaves: &[Presheaf]) -> Result<usize, String> {
    let a = sheafify(p, j).map_err(|e| e.to_string())?;
    let mut n = 0;
    for f in sheaves {
        let from_p = presheaf_morphisms(p, f).unwrap();
        let through: Vec<_> = presheaf_morphisms(&a.presheaf, f).unwrap().iter().map(|h| h.after(&a.unit).unwrap()).collect();
        let distinct: BTreeSet<_> = through.iter().map(|m| (0..m.source().sizes().len()).map(|x| m.component(grotto::ObjId(x)).to_vec()).collect::<Vec<_>>()).collect();
        ensure(through.len() == from_p.len() && distinct.len() == through.len(), || "unit does not induce a bijection".into())?;
        n += from_p.len();
    }
    Ok(n)
}

fn sheaf_pipeline() -> Verdict {
    let sq = fixtures::square2();
    let s12 = enumerate_topology(&stable_notion(&sq, &[fixtures::s12(&sq)]).unwrap());
    let mut r = rng(6);
    let mut separated = 0;
    for _ in 0..60 {
        let p = random_presheaf(&sq, &mut r, 2);
        let plus = plus_construction(&p, &s12).map_err(|e| e.to_string())?;
        ensure(is_separated(&plus.presheaf, &s12).unwrap(), || "plus is not separated".into())?;
        if is_separated(&p, &s12).unwrap() {
            ensure(is_sheaf(&plus.presheaf, &s12).unwrap(), || "plus of a separated presheaf is not a sheaf".into())?;
            separated += 1;
        }
        ensure(is_sheaf(&sheafify(&p, &s12).unwrap().presheaf, &s12).unwrap(), || "sheafification is not a sheaf".into())?;
    }
    let mut factorizations = 0;
    let arrow = fixtures::arrow();
    let su = enumerate_topology(&stable_notion(&arrow, &[Sieve::generated_by(&arrow, "b", &["u"]).unwrap()]).unwrap());
    for (c, j) in [(arrow, su), (sq.clone(), s12.clone())] {
        let all = small_presheaves(&c, 2);
        let sheaves: Vec<Presheaf> = all.iter().filter(|p| is_sheaf(p, &j).unwrap()).cloned().collect();
        for p in &all {
            factorizations += universal_property(p, &j, &sheaves)?;
        }
    }
    let t = sq.object("t").unwrap();
    let sizes: Vec<usize> = sq.object_ids().map(|x| usize::from(x != t)).collect();
    let hole = grotto::presheaf::all_presheaves(&sq, &sizes).unwrap().remove(0);
    ensure(terminal_like(&sheafify(&hole, &s12).unwrap().presheaf), || "∅-at-top does not sheafify to the terminal presheaf".into())?;
    Ok(format!("60 random presheaves ({separated} separated), {factorizations} factorizations"))
}

fn closed_subpresheaf_bridge() -> Verdict {
    let mut checks = 0;
    for c in [fixtures::arrow(), fixtures::vee()] {
        let pool = every_sieve(&c);
        let depth = sieve_count(&c) + 1;
        for mask in 0..1u32 << pool.len() {
            let j = stable_notion(&c, &subfamily(&pool, mask)).unwrap();
            for s in &pool {
                let q = SubPresheaf::of_sieve(&c, s);
                let closed = close_subpresheaf(&q, &j).map_err(|e| e.to_string())?;
                ensure(covers_generated(&j, s) == closed.is_full(), || format!("bridge fails on {}", s.describe(&c)))?;
                for x in c.object_ids() {
                    for e in 0..q.parent().size(x) {
                        let tree = tree_close_membership(&q, &j, x, e, depth).map_err(|e| e.to_string())?;
                        ensure(tree.is_covered() == closed.contains(x, e), || "tree membership disagrees".into())?;
                        checks += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checks} memberships agree"))
}

fn product_site() -> Verdict {
    let start = Instant::now();
    let sq = fixtures::square2();
    let s12 = enumerate_topology(&stable_notion(&sq, &[fixtures::s12(&sq)]).unwrap());
    let prod = product_category(&[sq.clone(), sq.clone()]).map_err(|e| e.to_string())?;
    let pc = prod.category.clone();
    let tops = [s12.clone(), s12.clone()];
    let grid = Presieve::from_names(&pc, "(t,t)", &["(x1->t,x1->t)", "(x1->t,x2->t)", "(x2->t,x1->t)", "(x2->t,x2->t)"]).unwrap();
    let single = Presieve::from_names(&pc, "(t,t)", &["(x1->t,id_t)"]).unwrap();
    ensure(product_join_covers(&prod, &tops, &grid).unwrap(), || "grid does not cover".into())?;
    ensure(!product_join_covers(&prod, &tops, &single).unwrap(), || "single slot covers".into())?;

    let gens = |prod: &grotto::constructions::ProductCategory, tops: &[Topology]| -> Vec<Sieve> {
        (0..tops.len()).flat_map(|i| induced_product_notion(prod, i, &tops[i]).unwrap().generators().to_vec()).collect()
    };
    let oracle = saturate_generated(&pc, &gens(&prod, &tops)).map_err(|e| e.to_string())?;
    let pool = every_sieve(&pc);
    for s in &pool {
        ensure(product_join_covers(&prod, &tops, s).unwrap() == oracle.covers(s), || format!("SQUARE2² verdict differs on {}", s.describe(&pc)))?;
    }
    let arrow = fixtures::arrow();
    let aa = product_category(&[arrow.clone(), arrow.clone()]).unwrap();
    let ts = all_topologies(&arrow, DEFAULT_GUARD).unwrap();
    let apool = every_sieve(&aa.category);
    let mut pairs = 0;
    for a in &ts {
        for b in &ts {
            let tops = [a.clone(), b.clone()];
            let brute = brute_force_generated(&aa.category, &gens(&aa, &tops), DEFAULT_GUARD).map_err(|e| e.to_string())?;
            for s in &apool {
                ensure(product_join_covers(&aa, &tops, s).unwrap() == brute.covers(s), || "ARROW² verdict differs from brute force".into())?;
            }
            pairs += 1;
        }
    }
    let took = within(start, 120)?;
    Ok(format!("{} SQUARE2² sieves vs saturation, {pairs} ARROW² topology pairs vs brute force, {:.2}s", pool.len(), took.as_secs_f64()))
}

fn all_models_satisfy(sig: &Signature, axioms: &[Sequent], goal: &Sequent) -> bool {
    carrier_vectors(sig.sort_count(), 3).iter().all(|carriers| {
        for_each_model(sig, carriers, |m| !axioms.iter().all(|a| holds_in_model(sig, m, a)) || holds_in_model(sig, m, goal))
    })
}

fn prover() -> Verdict {
    let start = Instant::now();
    let mut r = rng(9);
    for _ in 0..10 {
        let voc = random_vocabulary(&mut r);
        let sig = &voc.signature;
        let (phi, psi) = (voc.horn(&mut r, 3), voc.horn(&mut r, 3));
        let refl = Sequent::parse(sig, &format!("{phi} ⊢ {phi}")).unwrap();
        ensure(prove_bounded(sig, &[], &refl, 0, DEFAULT_CONTEXT_BOUND).unwrap().depth() == Some(0), || format!("{phi} ⊢ {phi} not proved"))?;
        let weak = Sequent::parse(sig, &format!("{phi} ∧ {psi} ⊢ {phi}")).unwrap();
        let d = prove_bounded(sig, &[], &weak, 1, DEFAULT_CONTEXT_BOUND).unwrap().depth();
        ensure(d.is_some_and(|d| d <= 1), || format!("{phi} ∧ {psi} ⊢ {phi} not proved"))?;
    }
    let sig = Signature::relational(&["A"], &[("R", &["A", "A"])]).unwrap();
    let sym = vec![Sequent::parse(&sig, "R(x,y) ⊢ R(y,x)").unwrap()];
    let goal = Sequent::parse(&sig, "R(x,y) ⊢ R(y,x) ∧ R(x,y)").unwrap();
    let d = prove_bounded(&sig, &sym, &goal, 4, DEFAULT_CONTEXT_BOUND).unwrap().depth();
    ensure(d.is_some_and(|d| d <= 2), || "symmetry example not proved at depth ≤ 2".into())?;
    let non_goal = Sequent::parse(&sig, "R(x,y) ⊢ R(x,x)").unwrap();
    let out = prove_bounded(&sig, &sym, &non_goal, 4, DEFAULT_CONTEXT_BOUND).unwrap();
    ensure(matches!(out, ProofOutcome::Unknown { .. }), || "non-goal was proved".into())?;
    let m = find_countermodel(&sig, &sym, &non_goal, 3).ok_or("no countermodel")?;
    ensure(m.carriers() == [2] && m.tuples(&sig, 0) == vec![vec![0, 1], vec![1, 0]], || "unexpected countermodel".into())?;

    let (mut pairs, mut proved) = (0, 0);
    while pairs < 40 {
        let voc = random_vocabulary(&mut r);
        let sig = &voc.signature;
        let axioms: Vec<String> = (0..r.gen_range(1..=2)).map(|_| format!("{} ⊢ {}", voc.horn(&mut r, 2), voc.geometric(&mut r))).collect();
        let goal = if r.gen_bool(0.5) {
            let base = &axioms[r.gen_range(0..axioms.len())];
            let (lhs, rhs) = base.split_once(" ⊢ ").unwrap();
            format!("{lhs} ∧ {} ⊢ {rhs}", voc.atom(&mut r))
        } else {
            format!("{} ⊢ {}", voc.horn(&mut r, 2), voc.geometric(&mut r))
        };
        let axioms: Vec<Sequent> = axioms.iter().map(|a| Sequent::parse(sig, a).unwrap()).collect();
        let goal = Sequent::parse(sig, &goal).unwrap();
        pairs += 1;
        if prove_bounded(sig, &axioms, &goal, 3, 6).unwrap().is_proved() {
            proved += 1;
            ensure(all_models_satisfy(sig, &axioms, &goal), || format!("unsound proof of {}", goal.describe(sig)))?;
        }
    }
    let took = within(start, 120)?;
    Ok(format!("{pairs} random pairs, {proved} proved and sound, {:.2}s", took.as_secs_f64()))
}

fn relationalization() -> Verdict {
    let mut r = rng(10);
    let mut formulas = 0;
    for k in 0..12 {
        let mut sig = Signature::new(if k % 3 == 2 { &["A", "B"][..] } else { &["A"][..] }).unwrap();
        let last = sig.sort_name(sig.sort_count() - 1).to_string();
        sig.add_relation("P", &[last.as_str()]).unwrap();
        sig.add_function("f", &["A"], &last).unwrap();
        if k % 2 == 1 {
            sig.add_function("g", &[last.as_str()], "A").unwrap();
        }
        let rel = relationalize(&sig).map_err(|e| e.to_string())?;
        ensure(rel.axioms.len() == 2 * sig.functions().len(), || "wrong number of graph axioms".into())?;
        let texts: Vec<String> = if sig.functions().len() == 2 {
            vec!["P(f(x))".into(), "f(g(f(x))) = f(x)".into(), "∃y:A. P(f(y)) ∧ g(f(y)) = x".into(), "P(f(g(f(x)))) ∨ f(x) = f(y)".into()]
        } else {
            vec!["P(f(x))".into(), "f(x) = f(y)".into(), "∃y:A. P(f(y)) ∧ f(y) = f(x)".into()]
        };
        let texts: Vec<String> = texts.into_iter().filter(|_| r.gen_bool(0.9)).collect();
        for text in &texts {
            let f = parse_formula(text).map_err(|e| e.to_string())?;
            let context = infer_context(&sig, &[&f]).map_err(|e| e.to_string())?;
            let nf = rel.translate_formula(&context, &f).map_err(|e| e.to_string())?;
            for carriers in carrier_vectors(sig.sort_count(), 3).iter().filter(|c| c.iter().all(|&n| n > 0)) {
                let ok = for_each_model(&sig, carriers, |m| {
                    let g = graph_model(&rel, m);
                    rel.axioms.iter().all(|a| holds_in_model(&rel.signature, &g, a))
                        && eval_ast_tuples(&sig, m, &context, &f).unwrap() == eval_formula(&rel.signature, &g, &nf)
                });
                ensure(ok, || format!("translation of `{text}` changes its meaning"))?;
            }
            formulas += 1;
        }
    }
    Ok(format!("12 signatures, {formulas} formulas agree on all models up to size 3"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("generation three-way agreement", generation_agreement),
        ("closure operator laws", closure_laws),
        ("Heyting adjunction and distributivity", heyting),
        ("Galois connection suite", galois_suite),
        ("Giraud equivalence and extraordinary image", giraud),
        ("sheaf pipeline", sheaf_pipeline),
        ("closed subpresheaf bridge", closed_subpresheaf_bridge),
        ("product site", product_site),
        ("bounded prover", prover),
        ("relationalization", relationalization),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
