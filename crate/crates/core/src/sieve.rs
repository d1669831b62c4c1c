//! Sieves and presieves on a finite category.
//!
//! Sieves are stored as bitsets over the morphisms of the ambient category,
//! so equality and inclusion are plain set operations.

use std::collections::{BTreeSet, HashSet};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::category::{FiniteCategory, MorId, ObjId};
use crate::error::{Error, Result};

/// An arbitrary family of morphisms with a common codomain.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Presieve {
    at: ObjId,
    members: BTreeSet<MorId>,
}

impl Presieve {
    pub fn new(c: &FiniteCategory, at: ObjId, members: impl IntoIterator<Item = MorId>) -> Result<Self> {
        check_object(c, at)?;
        let members: BTreeSet<MorId> = members.into_iter().collect();
        for &f in &members {
            check_morphism(c, f)?;
            if c.cod(f) != at {
                return Err(Error::CodomainMismatch {
                    morphism: c.morphism_name(f).into(),
                    expected: c.object_name(at).into(),
                    found: c.object_name(c.cod(f)).into(),
                });
            }
        }
        Ok(Presieve { at, members })
    }

    pub fn empty(at: ObjId) -> Self {
        Presieve { at, members: BTreeSet::new() }
    }

    pub fn from_names(c: &FiniteCategory, at: &str, members: &[&str]) -> Result<Self> {
        let members = members.iter().map(|m| c.morphism(m)).collect::<Result<Vec<_>>>()?;
        Presieve::new(c, c.object(at)?, members)
    }

    pub fn at(&self) -> ObjId {
        self.at
    }

    pub fn members(&self) -> &BTreeSet<MorId> {
        &self.members
    }

    /// The smallest sieve containing every member.
    pub fn generate(&self, c: &FiniteCategory) -> Sieve {
        let mut bits = FixedBitSet::with_capacity(c.morphism_count());
        for &f in &self.members {
            for &g in c.hom_into(c.dom(f)) {
                bits.insert(c.compose(f, g).0);
            }
        }
        Sieve { at: self.at, members: bits }
    }

    /// First member that `h` factors through, if any.
    pub fn factoring_member(&self, c: &FiniteCategory, h: MorId) -> Option<MorId> {
        self.members.iter().copied().find(|&f| c.factors_through(h, f))
    }
}

impl From<&Sieve> for Presieve {
    fn from(s: &Sieve) -> Self {
        Presieve { at: s.at, members: s.members().collect() }
    }
}

/// A set of morphisms into `at` closed under precomposition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sieve {
    at: ObjId,
    members: FixedBitSet,
}

impl Sieve {
    /// Checks codomains and closure under precomposition.
    pub fn new(c: &FiniteCategory, at: ObjId, members: impl IntoIterator<Item = MorId>) -> Result<Self> {
        let p = Presieve::new(c, at, members)?;
        let s = Sieve { at, members: p.members.iter().map(|f| f.0).collect_bits(c.morphism_count()) };
        if s != p.generate(c) {
            return Err(Error::NotASieve(c.object_name(at).into()));
        }
        Ok(s)
    }

    pub fn maximal(c: &FiniteCategory, x: ObjId) -> Self {
        Sieve { at: x, members: c.hom_into(x).iter().map(|f| f.0).collect_bits(c.morphism_count()) }
    }

    pub fn empty(c: &FiniteCategory, x: ObjId) -> Self {
        Sieve { at: x, members: FixedBitSet::with_capacity(c.morphism_count()) }
    }

    /// `⟨f⟩`, every composite `f ∘ g`.
    pub fn principal(c: &FiniteCategory, f: MorId) -> Self {
        Sieve {
            at: c.cod(f),
            members: c.hom_into(c.dom(f)).iter().map(|&g| c.compose(f, g).0).collect_bits(c.morphism_count()),
        }
    }

    /// The sieve generated by the named morphisms.
    pub fn generated_by(c: &FiniteCategory, at: &str, members: &[&str]) -> Result<Self> {
        Ok(Presieve::from_names(c, at, members)?.generate(c))
    }

    pub(crate) fn bits(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn at(&self) -> ObjId {
        self.at
    }

    pub fn contains(&self, f: MorId) -> bool {
        self.members.contains(f.0)
    }

    pub fn members(&self) -> impl Iterator<Item = MorId> + '_ {
        self.members.ones().map(MorId)
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn is_subset(&self, other: &Sieve) -> bool {
        self.at == other.at && self.members.is_subset(&other.members)
    }

    pub fn is_maximal(&self, c: &FiniteCategory) -> bool {
        self.contains(c.id(self.at))
    }

    /// `f* S = { g | f ∘ g ∈ S }`.
    pub fn pullback(&self, c: &FiniteCategory, f: MorId) -> Result<Sieve> {
        if c.cod(f) != self.at {
            return Err(Error::CodomainMismatch {
                morphism: c.morphism_name(f).into(),
                expected: c.object_name(self.at).into(),
                found: c.object_name(c.cod(f)).into(),
            });
        }
        Ok(self.pullback_unchecked(c, f))
    }

    pub(crate) fn pullback_unchecked(&self, c: &FiniteCategory, f: MorId) -> Sieve {
        let x = c.dom(f);
        Sieve {
            at: x,
            members: c
                .hom_into(x)
                .iter()
                .filter(|&&g| self.members.contains(c.compose(f, g).0))
                .map(|g| g.0)
                .collect_bits(c.morphism_count()),
        }
    }

    pub fn meet(&self, other: &Sieve) -> Result<Sieve> {
        self.same_target(other)?;
        let mut m = self.members.clone();
        m.intersect_with(&other.members);
        Ok(Sieve { at: self.at, members: m })
    }

    pub fn join(&self, other: &Sieve) -> Result<Sieve> {
        self.same_target(other)?;
        let mut m = self.members.clone();
        m.union_with(&other.members);
        Ok(Sieve { at: self.at, members: m })
    }

    fn same_target(&self, other: &Sieve) -> Result<()> {
        if self.at != other.at || self.members.len() != other.members.len() {
            return Err(Error::TargetMismatch(format!("{:?}", self.at), format!("{:?}", other.at)));
        }
        Ok(())
    }

    /// Members that do not factor properly through another member; they
    /// generate the sieve. Among mutually factoring members the smallest id is kept.
    pub fn generators(&self, c: &FiniteCategory) -> Vec<MorId> {
        let members: Vec<MorId> = self.members().collect();
        members
            .iter()
            .copied()
            .filter(|&f| {
                !members.iter().any(|&g| {
                    g != f && c.factors_through(f, g) && (!c.factors_through(g, f) || g < f)
                })
            })
            .collect()
    }

    /// `{u, id_b} at b`
    pub fn describe(&self, c: &FiniteCategory) -> String {
        let names: Vec<&str> = self.members().map(|f| c.morphism_name(f)).collect();
        format!("{{{}}} at {}", names.join(", "), c.object_name(self.at))
    }

    pub fn to_doc(&self, c: &FiniteCategory) -> SieveDoc {
        SieveDoc {
            at: c.object_name(self.at).into(),
            members: self.members().map(|f| c.morphism_name(f).into()).collect(),
        }
    }
}

trait CollectBits {
    fn collect_bits(self, len: usize) -> FixedBitSet;
}

impl<I: Iterator<Item = usize>> CollectBits for I {
    fn collect_bits(self, len: usize) -> FixedBitSet {
        let mut bits = FixedBitSet::with_capacity(len);
        bits.extend(self);
        bits
    }
}

fn check_object(c: &FiniteCategory, x: ObjId) -> Result<()> {
    if x.0 >= c.object_count() {
        return Err(Error::UnknownObject(format!("#{}", x.0)));
    }
    Ok(())
}

fn check_morphism(c: &FiniteCategory, f: MorId) -> Result<()> {
    if f.0 >= c.morphism_count() {
        return Err(Error::UnknownMorphism(format!("#{}", f.0)));
    }
    Ok(())
}

/// Anything that determines a sieve: a sieve itself or a presieve.
pub trait SieveLike {
    fn target(&self) -> ObjId;
    fn to_sieve(&self, c: &FiniteCategory) -> Sieve;
    fn as_presieve(&self) -> Presieve;
}

impl SieveLike for Sieve {
    fn target(&self) -> ObjId {
        self.at
    }
    fn to_sieve(&self, _: &FiniteCategory) -> Sieve {
        self.clone()
    }
    fn as_presieve(&self) -> Presieve {
        self.into()
    }
}

impl SieveLike for Presieve {
    fn target(&self) -> ObjId {
        self.at
    }
    fn to_sieve(&self, c: &FiniteCategory) -> Sieve {
        self.generate(c)
    }
    fn as_presieve(&self) -> Presieve {
        self.clone()
    }
}

pub fn generate_sieve(c: &FiniteCategory, p: &Presieve) -> Result<Sieve> {
    let checked = Presieve::new(c, p.at, p.members.iter().copied())?;
    Ok(checked.generate(c))
}

pub fn pullback_sieve(c: &FiniteCategory, s: &Sieve, f: MorId) -> Result<Sieve> {
    check_morphism(c, f)?;
    s.pullback(c, f)
}

pub fn maximal_sieve(c: &FiniteCategory, x: ObjId) -> Result<Sieve> {
    check_object(c, x)?;
    Ok(Sieve::maximal(c, x))
}

pub fn is_maximal(c: &FiniteCategory, s: &Sieve) -> bool {
    s.is_maximal(c)
}

pub fn sieve_meet(s1: &Sieve, s2: &Sieve) -> Result<Sieve> {
    s1.meet(s2)
}

pub fn sieve_join(s1: &Sieve, s2: &Sieve) -> Result<Sieve> {
    s1.join(s2)
}

/// Every sieve on `x`, smallest first, ties broken by member ids.
pub fn all_sieves(c: &FiniteCategory, x: ObjId) -> Vec<Sieve> {
    let principals: Vec<Sieve> = c.hom_into(x).iter().map(|&f| Sieve::principal(c, f)).collect();
    let mut seen: HashSet<FixedBitSet> = HashSet::new();
    let empty = Sieve::empty(c, x);
    seen.insert(empty.members.clone());
    let mut frontier = vec![empty];
    let mut out = Vec::new();
    while let Some(s) = frontier.pop() {
        for p in &principals {
            if p.members.is_subset(&s.members) {
                continue;
            }
            let mut m = s.members.clone();
            m.union_with(&p.members);
            if seen.insert(m.clone()) {
                frontier.push(Sieve { at: x, members: m });
            }
        }
        out.push(s);
    }
    out.sort_by_key(|s| (s.len(), s.members().collect::<Vec<_>>()));
    out
}

/// Number of sieves over all objects.
pub fn sieve_count(c: &FiniteCategory) -> usize {
    c.object_ids().map(|x| all_sieves(c, x).len()).sum()
}

/// Sieve file format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SieveDoc {
    pub at: String,
    pub members: Vec<String>,
}

impl SieveDoc {
    pub fn to_presieve(&self, c: &FiniteCategory) -> Result<Presieve> {
        let members = self.members.iter().map(|m| c.morphism(m)).collect::<Result<Vec<_>>>()?;
        Presieve::new(c, c.object(&self.at)?, members)
    }

    /// Rejects member sets that are not closed under precomposition.
    pub fn to_sieve(&self, c: &FiniteCategory) -> Result<Sieve> {
        let p = self.to_presieve(c)?;
        Sieve::new(c, p.at, p.members)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn named(c: &FiniteCategory, s: &Sieve) -> BTreeSet<String> {
        s.members().map(|f| c.morphism_name(f).to_string()).collect()
    }

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn generation_examples() {
        let arrow = fixtures::arrow();
        let b = arrow.object("b").unwrap();
        let u = arrow.morphism("u").unwrap();
        let s = generate_sieve(&arrow, &Presieve::new(&arrow, b, [u]).unwrap()).unwrap();
        assert_eq!(named(&arrow, &s), set(&["u"]));
        let s = generate_sieve(&arrow, &Presieve::new(&arrow, b, [arrow.id(b)]).unwrap()).unwrap();
        assert_eq!(named(&arrow, &s), set(&["id_b", "u"]));

        let sq = fixtures::square2();
        assert_eq!(named(&sq, &fixtures::s12(&sq)), set(&["x1->t", "x2->t", "o->t"]));
    }

    #[test]
    fn codomain_mismatch_is_rejected() {
        let arrow = fixtures::arrow();
        let a = arrow.object("a").unwrap();
        let u = arrow.morphism("u").unwrap();
        assert!(matches!(Presieve::new(&arrow, a, [u]), Err(Error::CodomainMismatch { .. })));
    }

    #[test]
    fn non_sieve_is_rejected() {
        let sq = fixtures::square2();
        let doc = SieveDoc { at: "t".into(), members: vec!["x1->t".into()] };
        assert!(matches!(doc.to_sieve(&sq), Err(Error::NotASieve(_))));
    }

    #[test]
    fn pullback_examples() {
        let arrow = fixtures::arrow();
        let (a, b) = (arrow.object("a").unwrap(), arrow.object("b").unwrap());
        let u = arrow.morphism("u").unwrap();
        let su = Sieve::principal(&arrow, u);
        assert_eq!(pullback_sieve(&arrow, &su, u).unwrap(), Sieve::maximal(&arrow, a));
        assert_eq!(Sieve::maximal(&arrow, b).pullback(&arrow, u).unwrap(), Sieve::maximal(&arrow, a));
        assert!(Sieve::empty(&arrow, b).pullback(&arrow, u).unwrap().is_empty());
        assert!(su.pullback(&arrow, arrow.id(a)).is_err());
    }

    #[test]
    fn set_operations() {
        let arrow = fixtures::arrow();
        let b = arrow.object("b").unwrap();
        let su = Sieve::principal(&arrow, arrow.morphism("u").unwrap());
        let max = maximal_sieve(&arrow, b).unwrap();
        assert!(is_maximal(&arrow, &max));
        assert_eq!(sieve_meet(&su, &max).unwrap(), su);
        assert_eq!(sieve_join(&Sieve::empty(&arrow, b), &su).unwrap(), su);
        let a = arrow.object("a").unwrap();
        assert!(matches!(sieve_meet(&su, &Sieve::maximal(&arrow, a)), Err(Error::TargetMismatch(..))));
    }

    #[test]
    fn sieve_counts() {
        assert_eq!(sieve_count(&fixtures::arrow()), 5);
        assert_eq!(sieve_count(&fixtures::vee()), 8);
        let sq = fixtures::square2();
        assert_eq!(sieve_count(&sq), 14);
        assert_eq!(all_sieves(&sq, sq.object("t").unwrap()).len(), 6);
    }

    #[test]
    fn generators_are_irredundant() {
        let sq = fixtures::square2();
        let names: BTreeSet<String> =
            fixtures::s12(&sq).generators(&sq).into_iter().map(|f| sq.morphism_name(f).to_string()).collect();
        assert_eq!(names, set(&["x1->t", "x2->t"]));
    }
}
