//! Moving topologies along functors: fibrations and Giraud topologies,
//! direct, inverse and extraordinary images, product sites and comma
//! categories.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::category::{FiniteCategory, MorId, ObjId};
use crate::constructions::{CommaCategory, ProductCategory};
use crate::error::{Error, Result};
use crate::functor::FunctorMap;
use crate::sieve::{all_sieves, Presieve, Sieve, SieveLike};
use crate::topology::{
    check_sieve, check_topology, close_sieve, enumerate_topology, Coverage, StableNotion, Topology, TopologyViolation,
};

/// Whether `x` has the unique lifting property relative to `p`.
pub fn is_cartesian(p: &FunctorMap, x: MorId) -> bool {
    let (c, b) = (&**p.source(), &**p.target());
    let (x_dom, x_cod) = (c.dom(x), c.cod(x));
    c.hom_into(x_cod).iter().all(|&x1| {
        let x1_dom = c.dom(x1);
        b.hom(p.obj(x1_dom), p.obj(x_dom)).filter(|&bm| b.compose(p.mor(x), bm) == p.mor(x1)).all(|bm| {
            c.hom(x1_dom, x_dom).filter(|&y| c.compose(x, y) == x1 && p.mor(y) == bm).count() == 1
        })
    })
}

/// A chosen cartesian lift of `b : Y → p(X)` at `X`: a cartesian
/// `morphism : X′ → X` and an isomorphism `iso : Y → p(X′)` with
/// `p(morphism) ∘ iso = b`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Lift {
    pub morphism: MorId,
    pub iso: MorId,
}

/// A functor together with one cartesian lift per (object, base morphism).
#[derive(Clone, Debug)]
pub struct FibrationWitness {
    functor: FunctorMap,
    lifts: HashMap<(ObjId, MorId), Lift>,
}

/// The first pair `(X, b)` without a cartesian lift.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibrationFailure {
    pub object: String,
    pub morphism: String,
}

impl From<FibrationFailure> for Error {
    fn from(f: FibrationFailure) -> Self {
        Error::NotAFibration { object: f.object, morphism: f.morphism }
    }
}

impl FibrationWitness {
    pub fn functor(&self) -> &FunctorMap {
        &self.functor
    }

    pub fn total(&self) -> &Arc<FiniteCategory> {
        self.functor.source()
    }

    pub fn base(&self) -> &Arc<FiniteCategory> {
        self.functor.target()
    }

    pub fn lift(&self, x: ObjId, b: MorId) -> Lift {
        self.lifts[&(x, b)]
    }

    /// Recorded lifts in a stable order.
    pub fn lifts(&self) -> Vec<((ObjId, MorId), Lift)> {
        let mut all: Vec<_> = self.lifts.iter().map(|(k, v)| (*k, *v)).collect();
        all.sort();
        all
    }
}

/// All cartesian lifts of `b` at `x`, ordered by morphism names.
fn cartesian_lifts(p: &FunctorMap, cartesian: &[bool], x: ObjId, b: MorId) -> Vec<Lift> {
    let (c, base) = (&**p.source(), &**p.target());
    let y = base.dom(b);
    let mut found: Vec<Lift> = c
        .hom_into(x)
        .iter()
        .filter(|m| cartesian[m.0])
        .flat_map(|&m| {
            base.hom(y, p.obj(c.dom(m)))
                .filter(move |&i| base.compose(p.mor(m), i) == b && base.is_iso(i))
                .map(move |i| Lift { morphism: m, iso: i })
        })
        .collect();
    found.sort_by_key(|l| (c.morphism_name(l.morphism).to_string(), base.morphism_name(l.iso).to_string()));
    found
}

/// Chooses the first lift in name order for every pair, or reports the
/// first pair with none.
pub fn check_fibration(p: &FunctorMap) -> std::result::Result<FibrationWitness, FibrationFailure> {
    check_fibration_with(p, |_| 0)
}

/// Like [`check_fibration`], with `pick` choosing among the available lifts.
pub fn check_fibration_with(
    p: &FunctorMap,
    pick: impl Fn(&[Lift]) -> usize,
) -> std::result::Result<FibrationWitness, FibrationFailure> {
    let (c, base) = (&**p.source(), &**p.target());
    let cartesian: Vec<bool> = c.morphism_ids().map(|m| is_cartesian(p, m)).collect();
    let mut lifts = HashMap::new();
    for x in c.object_ids() {
        for &b in base.hom_into(p.obj(x)) {
            let options = cartesian_lifts(p, &cartesian, x, b);
            if options.is_empty() {
                return Err(FibrationFailure { object: c.object_name(x).into(), morphism: base.morphism_name(b).into() });
            }
            lifts.insert((x, b), options[pick(&options).min(options.len() - 1)]);
        }
    }
    Ok(FibrationWitness { functor: p.clone(), lifts })
}

/// `C_p = { b | the lift of b lies in s }`.
pub fn pushdown_sieve(w: &FibrationWitness, s: &Sieve) -> Sieve {
    let (p, base) = (&w.functor, w.base());
    let x = s.at();
    let members = base.hom_into(p.obj(x)).iter().copied().filter(|&b| s.contains(w.lift(x, b).morphism));
    Sieve::new(base, p.obj(x), members).expect("pushdown of a sieve is a sieve")
}

/// Coverage for the Giraud topology: the pushdown covers in the base.
pub fn giraud_covers(w: &FibrationWitness, j_base: &impl Coverage, s: &Sieve) -> bool {
    j_base.is_covering(&pushdown_sieve(w, s))
}

/// The Giraud topology on the total category, listed extensionally.
pub fn giraud_topology(w: &FibrationWitness, j_base: &impl Coverage) -> Topology {
    let c = w.total();
    let covering = c.object_ids().flat_map(|x| all_sieves(c, x)).filter(|s| giraud_covers(w, j_base, s));
    Topology::new(c.clone(), covering).expect("sieves of the total category")
}

/// Sieves `{ x into X | p(x) ∈ b* C }` for every covering `C` at `Y` and
/// every `b : p(X) → Y`.
pub fn generic_generators(w: &FibrationWitness, j_base: &Topology) -> Vec<Sieve> {
    let (p, c, base) = (&w.functor, w.total(), w.base());
    let mut out = BTreeSet::new();
    for x in c.object_ids() {
        for cover in j_base.sieves() {
            for b in base.hom(p.obj(x), cover.at()) {
                let pulled = cover.pullback_unchecked(base, b);
                let members = c.hom_into(x).iter().copied().filter(|&m| pulled.contains(p.mor(m)));
                out.insert(Sieve::new(c, x, members).expect("preimage of a sieve is a sieve"));
            }
        }
    }
    out.into_iter().collect()
}

/// The presieve `{ ρ(f) | f ∈ s }` at `ρ(at)`.
pub fn image_presieve(rho: &FunctorMap, s: &Sieve) -> Presieve {
    Presieve::new(rho.target(), rho.obj(s.at()), s.members().map(|f| rho.mor(f))).expect("functor preserves codomains")
}

/// Topology on the target of `ρ` generated by the covering sieves of
/// `k_base` and the images of the source generators.
pub fn inverse_image_topology(rho: &FunctorMap, k_base: &Topology, j1_gens: &[Sieve]) -> Result<Topology> {
    if !Arc::ptr_eq(k_base.base(), rho.target()) && **k_base.base() != **rho.target() {
        return Err(Error::BaseMismatch);
    }
    let mut gens: Vec<Sieve> = k_base.sieves().cloned().collect();
    for g in j1_gens {
        check_sieve(rho.source(), g)?;
        gens.push(image_presieve(rho, g).generate(rho.target()));
    }
    Ok(enumerate_topology(&StableNotion::new(rho.target().clone(), gens)?))
}

/// The inverse image along a fibration, from the generic generators.
pub fn generic_inverse_image(w: &FibrationWitness, j_base: &Topology) -> Result<Topology> {
    let total = w.total().clone();
    inverse_image_topology(&FunctorMap::identity(total.clone()), &Topology::minimal(total), &generic_generators(w, j_base))
}

/// A covering system on the source of `ρ` and its axiom report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectImage {
    pub candidate: Topology,
    pub report: Vec<TopologyViolation>,
}

/// Declares `s` covering when the sieve generated by its image is
/// `k1`-covering; the axioms are checked, not assumed.
pub fn direct_image_topology(rho: &FunctorMap, k1: &Topology) -> Result<DirectImage> {
    if !Arc::ptr_eq(k1.base(), rho.target()) && **k1.base() != **rho.target() {
        return Err(Error::BaseMismatch);
    }
    let c = rho.source();
    let covering = c
        .object_ids()
        .flat_map(|x| all_sieves(c, x))
        .filter(|s| k1.covers(&image_presieve(rho, s)));
    let candidate = Topology::new(c.clone(), covering)?;
    let report = check_topology(&candidate);
    Ok(DirectImage { candidate, report })
}

/// Topology on the base generated by `j_base` and the pushdowns of `k_gens`.
pub fn extraordinary_image(w: &FibrationWitness, j_base: &Topology, k_gens: &[Sieve]) -> Result<Topology> {
    let mut gens: Vec<Sieve> = j_base.sieves().cloned().collect();
    for g in k_gens {
        check_sieve(w.total(), g)?;
        gens.push(pushdown_sieve(w, g));
    }
    Ok(enumerate_topology(&StableNotion::new(w.base().clone(), gens)?))
}

/// Stable notion on a product whose generators are `jᵢ`-covering families
/// in slot `i` with identities elsewhere.
pub fn induced_product_notion(prod: &ProductCategory, i: usize, j_i: &Topology) -> Result<StableNotion> {
    let n = prod.factors.len();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    if !Arc::ptr_eq(j_i.base(), &prod.factors[i]) && **j_i.base() != *prod.factors[i] {
        return Err(Error::BaseMismatch);
    }
    let pc = &prod.category;
    let mut gens = Vec::new();
    for z in pc.object_ids() {
        let tuple = prod.object_tuple(z).to_vec();
        for cover in j_i.covering_at(tuple[i]) {
            let members = cover.members().map(|f| {
                let slots: Vec<MorId> =
                    (0..n).map(|k| if k == i { f } else { prod.factors[k].id(tuple[k]) }).collect();
                prod.morphism_of(&slots).expect("tuple of morphisms")
            });
            gens.push(Presieve::new(pc, z, members)?.generate(pc));
        }
    }
    StableNotion::new(pc.clone(), gens)
}

/// Coverage for the join of the induced factor topologies: the only sieve
/// containing `s` closed for every factor is maximal.
pub fn product_join_covers(prod: &ProductCategory, tops: &[Topology], s: &impl SieveLike) -> Result<bool> {
    if tops.len() != prod.factors.len() {
        return Err(Error::IndexOutOfRange { index: tops.len(), len: prod.factors.len() });
    }
    let notions = tops.iter().enumerate().map(|(i, t)| induced_product_notion(prod, i, t)).collect::<Result<Vec<_>>>()?;
    let mut current = s.to_sieve(&prod.category);
    loop {
        let before = current.clone();
        for j in &notions {
            current = close_sieve(j, &current);
        }
        if current == before {
            return Ok(current.is_maximal(&prod.category));
        }
    }
}

/// On the comma category of `ρ : B → C`: a sieve covers when the sieve
/// generated by its image under `q` is `k`-covering.
pub fn comma_topology(comma: &CommaCategory, k: &Topology) -> Result<Topology> {
    let q = &comma.q;
    if !Arc::ptr_eq(k.base(), q.target()) && **k.base() != **q.target() {
        return Err(Error::BaseMismatch);
    }
    let c = &comma.category;
    let covering = c.object_ids().flat_map(|z| all_sieves(c, z)).filter(|s| k.covers(&image_presieve(q, s)));
    Topology::new(c.clone(), covering)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{comma_category, discrete, product_category};
    use crate::fixtures;
    use crate::topology::stable_notion;

    fn su_topology(arrow: &Arc<FiniteCategory>) -> Topology {
        enumerate_topology(&stable_notion(arrow, &[Sieve::generated_by(arrow, "b", &["u"]).unwrap()]).unwrap())
    }

    #[test]
    fn cartesian_examples() {
        let p = fixtures::elts_projection();
        for m in p.source().morphism_ids() {
            assert!(is_cartesian(&p, m));
        }
        let arrow = fixtures::arrow();
        let k = FunctorMap::constant(arrow.clone(), Arc::new(discrete(&["*"])), ObjId(0));
        assert!(is_cartesian(&k, arrow.id(ObjId(0))));
        assert!(!is_cartesian(&k, arrow.morphism("u").unwrap()));
    }

    #[test]
    fn fibration_examples() {
        assert!(check_fibration(&fixtures::elts_projection()).is_ok());

        let sq = fixtures::square2();
        let comma = comma_category(&FunctorMap::identity(sq)).unwrap();
        assert!(check_fibration(&comma.p).is_ok());

        let arrow = fixtures::arrow();
        let disc = Arc::new(discrete(&["a", "b"]));
        let incl = FunctorMap::new(disc, arrow.clone(), vec![ObjId(0), ObjId(1)], vec![arrow.id(ObjId(0)), arrow.id(ObjId(1))]).unwrap();
        assert_eq!(
            check_fibration(&incl).unwrap_err(),
            FibrationFailure { object: "b".into(), morphism: "u".into() }
        );
    }

    #[test]
    fn pushdown_examples() {
        let w = check_fibration(&fixtures::elts_projection()).unwrap();
        let (elts, arrow) = (w.total().clone(), w.base().clone());
        let b0 = elts.object("(b,0)").unwrap();
        assert!(pushdown_sieve(&w, &Sieve::maximal(&elts, b0)).is_maximal(&arrow));
        assert!(pushdown_sieve(&w, &Sieve::empty(&elts, b0)).is_empty());
        let s = Sieve::generated_by(&elts, "(b,0)", &["u:(a,0)->(b,0)"]).unwrap();
        assert_eq!(pushdown_sieve(&w, &s), Sieve::generated_by(&arrow, "b", &["u"]).unwrap());
    }

    #[test]
    fn giraud_examples() {
        let w = check_fibration(&fixtures::elts_projection()).unwrap();
        let (elts, arrow) = (w.total().clone(), w.base().clone());
        let s = Sieve::generated_by(&elts, "(b,0)", &["u:(a,0)->(b,0)"]).unwrap();
        assert!(giraud_covers(&w, &su_topology(&arrow), &s));
        assert!(!giraud_covers(&w, &Topology::minimal(arrow.clone()), &s));
        let max = Sieve::maximal(&elts, s.at());
        assert!(giraud_covers(&w, &Topology::minimal(arrow.clone()), &max));
        let gens = stable_notion(&arrow, &[Sieve::generated_by(&arrow, "b", &["u"]).unwrap()]).unwrap();
        assert!(giraud_covers(&w, &gens, &s));
    }

    #[test]
    fn inverse_image_examples() {
        let arrow = fixtures::arrow();
        let id = FunctorMap::identity(arrow.clone());
        let gens = [Sieve::generated_by(&arrow, "b", &["u"]).unwrap()];
        let min = Topology::minimal(arrow.clone());
        assert_eq!(inverse_image_topology(&id, &min, &gens).unwrap(), su_topology(&arrow));
        let j = su_topology(&arrow);
        assert_eq!(inverse_image_topology(&id, &j, &[]).unwrap(), j);

        let w = check_fibration(&fixtures::elts_projection()).unwrap();
        assert_eq!(generic_inverse_image(&w, &j).unwrap(), giraud_topology(&w, &j));
    }

    #[test]
    fn direct_image_examples() {
        let arrow = fixtures::arrow();
        let j = su_topology(&arrow);
        let d = direct_image_topology(&FunctorMap::identity(arrow.clone()), &j).unwrap();
        assert_eq!(d.candidate, j);
        assert!(d.report.is_empty());

        let p = fixtures::elts_projection();
        let elts = p.source().clone();
        let d = direct_image_topology(&p, &j).unwrap();
        assert!(d.report.is_empty());
        for i in ["0", "1"] {
            let s = Sieve::generated_by(&elts, &format!("(b,{i})"), &[&format!("u:(a,{i})->(b,{i})")]).unwrap();
            assert!(d.candidate.covers(&s));
        }

        let point = Arc::new(discrete(&["*"]));
        let k = FunctorMap::constant(arrow.clone(), point.clone(), ObjId(0));
        let d = direct_image_topology(&k, &Topology::degenerate(point)).unwrap();
        assert_eq!(d.candidate, Topology::degenerate(arrow));
        assert!(d.report.is_empty());
    }

    #[test]
    fn extraordinary_image_examples() {
        let w = check_fibration(&fixtures::elts_projection()).unwrap();
        let (elts, arrow) = (w.total().clone(), w.base().clone());
        let min = Topology::minimal(arrow.clone());
        let s = Sieve::generated_by(&elts, "(b,0)", &["u:(a,0)->(b,0)"]).unwrap();
        assert_eq!(extraordinary_image(&w, &min, &[s]).unwrap(), su_topology(&arrow));
        let j = su_topology(&arrow);
        assert_eq!(extraordinary_image(&w, &j, &[]).unwrap(), j);
        let maxes: Vec<Sieve> = elts.object_ids().map(|x| Sieve::maximal(&elts, x)).collect();
        assert_eq!(extraordinary_image(&w, &j, &maxes).unwrap(), j);
    }

    #[test]
    fn product_notion_examples() {
        let arrow = fixtures::arrow();
        let prod = product_category(&[arrow.clone(), arrow.clone()]).unwrap();
        let pc = prod.category.clone();
        let j = induced_product_notion(&prod, 0, &su_topology(&arrow)).unwrap();
        let s = Sieve::generated_by(&pc, "(b,b)", &["(u,id_b)"]).unwrap();
        assert!(j.is_stable_covering(&s));
        let min = induced_product_notion(&prod, 1, &Topology::minimal(arrow.clone())).unwrap();
        assert!(!min.is_stable_covering(&s));
        assert!(matches!(induced_product_notion(&prod, 2, &su_topology(&arrow)), Err(Error::IndexOutOfRange { .. })));

        let sq = fixtures::square2();
        let prod = product_category(&[sq.clone(), sq.clone()]).unwrap();
        let s12 = enumerate_topology(&stable_notion(&sq, &[fixtures::s12(&sq)]).unwrap());
        let j = induced_product_notion(&prod, 1, &s12).unwrap();
        let s = Sieve::generated_by(&prod.category, "(t,t)", &["(id_t,x1->t)", "(id_t,x2->t)"]).unwrap();
        assert!(j.is_stable_covering(&s));
    }

    #[test]
    fn product_join_examples() {
        let sq = fixtures::square2();
        let prod = product_category(&[sq.clone(), sq.clone()]).unwrap();
        let pc = prod.category.clone();
        let s12 = enumerate_topology(&stable_notion(&sq, &[fixtures::s12(&sq)]).unwrap());
        let tops = [s12.clone(), s12];
        let tt = pc.object("(t,t)").unwrap();
        assert!(product_join_covers(&prod, &tops, &Sieve::maximal(&pc, tt)).unwrap());
        let grid = Presieve::from_names(&pc, "(t,t)", &["(x1->t,x1->t)", "(x1->t,x2->t)", "(x2->t,x1->t)", "(x2->t,x2->t)"]).unwrap();
        assert!(product_join_covers(&prod, &tops, &grid).unwrap());
        let single = Presieve::from_names(&pc, "(t,t)", &["(x1->t,id_t)"]).unwrap();
        assert!(!product_join_covers(&prod, &tops, &single).unwrap());
    }

    #[test]
    fn comma_topology_examples() {
        let sq = fixtures::square2();
        let comma = comma_category(&FunctorMap::identity(sq.clone())).unwrap();
        let k = enumerate_topology(&stable_notion(&sq, &[fixtures::s12(&sq)]).unwrap());
        let t = comma_topology(&comma, &k).unwrap();
        for s in t.sieves() {
            assert!(k.covers(&image_presieve(&comma.q, s)));
        }
        assert!(check_topology(&t).is_empty());
        let from_min = comma_topology(&comma, &Topology::minimal(sq.clone())).unwrap();
        assert!(check_topology(&from_min).is_empty());
        let z = comma.category.object("(o,t,o->t)").unwrap();
        let s = Sieve::principal(&comma.category, comma.category.morphism("(id_o,x1->t):(o,x1,o->x1)->(o,t,o->t)").unwrap());
        assert_eq!(s.at(), z);
        assert!(from_min.covers(&s));
        assert!(check_fibration(&comma.p).is_ok());
    }
}
