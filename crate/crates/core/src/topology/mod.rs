//! Grothendieck topologies on finite categories, stable covering notions
//! and the closure of sieves.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::category::{FiniteCategory, ObjId};
use crate::error::{Error, Result};
use crate::sieve::{all_sieves, Sieve, SieveDoc, SieveLike};

mod brute;
mod tree;

pub use brute::{all_topologies, brute_force_generated, saturate_generated, TopologySpace, DEFAULT_GUARD};
pub use tree::{
    compose_multicoverings, pullback_multicovering, tree_covers, validate_certificate, validate_multicovering,
    Certificate, CoveringNotion, LeafReason, LeafWitness, MultiCovering, Tree, TreeMorphism, TreeOutcome,
};
pub(crate) use tree::state_search;

pub(crate) fn same_base(a: &Arc<FiniteCategory>, b: &Arc<FiniteCategory>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A covering system: per object, a set of sieves declared covering.
///
/// Nothing forces the axioms at construction; [`check_topology`] reports
/// which of them fail.
#[derive(Clone, Debug)]
pub struct Topology {
    base: Arc<FiniteCategory>,
    covering: Vec<BTreeSet<Sieve>>,
}

impl PartialEq for Topology {
    fn eq(&self, other: &Self) -> bool {
        same_base(&self.base, &other.base) && self.covering == other.covering
    }
}

impl Eq for Topology {}

impl Topology {
    pub fn new(base: Arc<FiniteCategory>, covering: impl IntoIterator<Item = Sieve>) -> Result<Self> {
        let mut sets = vec![BTreeSet::new(); base.object_count()];
        for s in covering {
            check_sieve(&base, &s)?;
            sets[s.at().0].insert(s);
        }
        Ok(Topology { base, covering: sets })
    }

    pub(crate) fn from_sets(base: Arc<FiniteCategory>, covering: Vec<BTreeSet<Sieve>>) -> Self {
        Topology { base, covering }
    }

    /// Only maximal sieves cover.
    pub fn minimal(base: Arc<FiniteCategory>) -> Self {
        let covering = base.object_ids().map(|x| BTreeSet::from([Sieve::maximal(&base, x)])).collect();
        Topology { base, covering }
    }

    /// Every sieve covers, the empty one included.
    pub fn degenerate(base: Arc<FiniteCategory>) -> Self {
        let covering = base.object_ids().map(|x| all_sieves(&base, x).into_iter().collect()).collect();
        Topology { base, covering }
    }

    pub fn base(&self) -> &Arc<FiniteCategory> {
        &self.base
    }

    pub fn covering_at(&self, x: ObjId) -> &BTreeSet<Sieve> {
        &self.covering[x.0]
    }

    pub fn covers(&self, s: &impl SieveLike) -> bool {
        self.covering[s.target().0].contains(&s.to_sieve(&self.base))
    }

    pub fn sieves(&self) -> impl Iterator<Item = &Sieve> {
        self.covering.iter().flatten()
    }

    pub fn is_subset(&self, other: &Topology) -> bool {
        self.covering.iter().zip(&other.covering).all(|(a, b)| a.is_subset(b))
    }

    pub fn check_same_base(&self, other: &Topology) -> Result<()> {
        if same_base(&self.base, &other.base) {
            Ok(())
        } else {
            Err(Error::BaseMismatch)
        }
    }
}

pub(crate) fn check_sieve(c: &FiniteCategory, s: &Sieve) -> Result<()> {
    if s.at().0 >= c.object_count() || s.bits().len() != c.morphism_count() {
        return Err(Error::BaseMismatch);
    }
    Ok(())
}

/// A violated topology axiom.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum TopologyViolation {
    Maximal { object: String },
    Stability { sieve: String, morphism: String },
    Locality { sieve: String, witness: String },
}

impl fmt::Display for TopologyViolation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyViolation::Maximal { object } => write!(out, "maximal sieve on `{object}` is not covering"),
            TopologyViolation::Stability { sieve, morphism } => {
                write!(out, "covering sieve {sieve} pulled back along `{morphism}` is not covering")
            }
            TopologyViolation::Locality { sieve, witness } => {
                write!(out, "{sieve} is locally covering over {witness} but not covering")
            }
        }
    }
}

/// Checks maximality, stability and locality.
pub fn check_topology(t: &Topology) -> Vec<TopologyViolation> {
    let c = &*t.base;
    let mut report = Vec::new();
    for x in c.object_ids() {
        if !t.covering[x.0].contains(&Sieve::maximal(c, x)) {
            report.push(TopologyViolation::Maximal { object: c.object_name(x).into() });
        }
    }
    for s in t.sieves() {
        for &f in c.hom_into(s.at()) {
            if !t.covers(&s.pullback_unchecked(c, f)) {
                report.push(TopologyViolation::Stability { sieve: s.describe(c), morphism: c.morphism_name(f).into() });
            }
        }
    }
    for x in c.object_ids() {
        for s in all_sieves(c, x) {
            if t.covering[x.0].contains(&s) {
                continue;
            }
            let witness = t.covering[x.0].iter().find(|w| w.members().all(|f| t.covers(&s.pullback_unchecked(c, f))));
            if let Some(w) = witness {
                report.push(TopologyViolation::Locality { sieve: s.describe(c), witness: w.describe(c) });
            }
        }
    }
    report
}

/// A raw covering predicate, used by closure operators.
pub trait CoveringPredicate {
    fn base(&self) -> &Arc<FiniteCategory>;
    fn admits(&self, s: &Sieve) -> bool;
}

impl CoveringPredicate for Topology {
    fn base(&self) -> &Arc<FiniteCategory> {
        &self.base
    }
    fn admits(&self, s: &Sieve) -> bool {
        self.covering[s.at().0].contains(s)
    }
}

/// Coverage for a topology: membership for [`Topology`], coverage in the
/// generated topology for [`StableNotion`].
pub trait Coverage {
    fn base(&self) -> &Arc<FiniteCategory>;
    fn is_covering(&self, s: &Sieve) -> bool;
}

impl Coverage for Topology {
    fn base(&self) -> &Arc<FiniteCategory> {
        &self.base
    }
    fn is_covering(&self, s: &Sieve) -> bool {
        self.covering[s.at().0].contains(s)
    }
}

/// The smallest pullback-stable, upward closed notion containing a list of
/// generator sieves: `C` is stable-covering when it is maximal or contains
/// `x* Cᵢ` for some generator `Cᵢ` and some `x`.
#[derive(Clone, Debug)]
pub struct StableNotion {
    base: Arc<FiniteCategory>,
    generators: Vec<Sieve>,
    pulled: Vec<Vec<Sieve>>,
}

impl StableNotion {
    pub fn new(base: Arc<FiniteCategory>, generators: Vec<Sieve>) -> Result<Self> {
        let mut pulled = vec![BTreeSet::new(); base.object_count()];
        for g in &generators {
            check_sieve(&base, g)?;
            for &x in base.hom_into(g.at()) {
                let p = g.pullback_unchecked(&base, x);
                if !p.is_maximal(&base) {
                    pulled[p.at().0].insert(p);
                }
            }
        }
        let pulled = pulled
            .into_iter()
            .map(|set| {
                let mut v: Vec<Sieve> = set.into_iter().collect();
                v.sort_by_key(|s| (s.len(), s.members().collect::<Vec<_>>()));
                v
            })
            .collect();
        Ok(StableNotion { base, generators, pulled })
    }

    /// The notion generated by every covering sieve of a topology.
    pub fn of_topology(t: &Topology) -> Self {
        Self::new(t.base.clone(), t.sieves().cloned().collect()).expect("sieves of the same base")
    }

    pub fn generators(&self) -> &[Sieve] {
        &self.generators
    }

    /// Non-maximal pullbacks of generators to `x`, smallest first.
    pub fn basic_covers(&self, x: ObjId) -> &[Sieve] {
        &self.pulled[x.0]
    }

    pub fn is_stable_covering(&self, s: &Sieve) -> bool {
        s.is_maximal(&self.base) || self.pulled[s.at().0].iter().any(|p| p.is_subset(s))
    }

    pub fn base(&self) -> &Arc<FiniteCategory> {
        &self.base
    }
}

impl CoveringPredicate for StableNotion {
    fn base(&self) -> &Arc<FiniteCategory> {
        &self.base
    }
    fn admits(&self, s: &Sieve) -> bool {
        self.is_stable_covering(s)
    }
}

impl Coverage for StableNotion {
    fn base(&self) -> &Arc<FiniteCategory> {
        &self.base
    }
    fn is_covering(&self, s: &Sieve) -> bool {
        covers_generated(self, s)
    }
}

pub fn stable_notion(c: &Arc<FiniteCategory>, gens: &[Sieve]) -> Result<StableNotion> {
    StableNotion::new(c.clone(), gens.to_vec())
}

/// Least fixed point of adding `x` whenever `x*` of the current sieve is
/// admitted by `j`.
///
/// `x` is added together with its principal sieve: by stability every
/// `x ∘ g` qualifies as well, and the running value stays a sieve.
pub fn close_sieve(j: &impl CoveringPredicate, s: &Sieve) -> Sieve {
    let c = &**j.base();
    let mut current = s.clone();
    loop {
        let mut changed = false;
        for &x in c.hom_into(s.at()) {
            if !current.contains(x) && j.admits(&current.pullback_unchecked(c, x)) {
                current = current.join(&Sieve::principal(c, x)).expect("same target");
                changed = true;
            }
        }
        if !changed {
            return current;
        }
    }
}

pub fn is_closed(j: &impl CoveringPredicate, s: &Sieve) -> bool {
    close_sieve(j, s) == *s
}

/// Coverage for the topology generated by `j`: the closure is maximal.
pub fn covers_generated(j: &StableNotion, s: &impl SieveLike) -> bool {
    close_sieve(j, &s.to_sieve(&j.base)).is_maximal(&j.base)
}

/// The generated topology, listed extensionally.
pub fn enumerate_topology(j: &StableNotion) -> Topology {
    let c = &j.base;
    let covering = c.object_ids().map(|x| all_sieves(c, x).into_iter().filter(|s| covers_generated(j, s)).collect()).collect();
    Topology { base: c.clone(), covering }
}

/// Topology file format: generator presieves, or the covering sieves
/// listed per object. Exactly one of the two blocks is present.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<SieveDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covering: Option<BTreeMap<String, Vec<Vec<String>>>>,
}

impl TopologyDoc {
    pub fn from_generators(c: &FiniteCategory, gens: &[Sieve]) -> Self {
        TopologyDoc { generators: Some(gens.iter().map(|g| g.to_doc(c)).collect()), covering: None }
    }

    pub fn from_topology(t: &Topology) -> Self {
        let c = &t.base;
        let covering = c
            .object_ids()
            .map(|x| {
                let sieves = t.covering[x.0].iter().map(|s| s.members().map(|f| c.morphism_name(f).to_string()).collect()).collect();
                (c.object_name(x).to_string(), sieves)
            })
            .collect();
        TopologyDoc { generators: None, covering: Some(covering) }
    }

    /// Generator sieves: the generated sieves of the listed presieves, or
    /// every listed covering sieve.
    pub fn generator_sieves(&self, c: &FiniteCategory) -> Result<Vec<Sieve>> {
        match (&self.generators, &self.covering) {
            (Some(gens), None) => gens.iter().map(|g| Ok(g.to_presieve(c)?.generate(c))).collect(),
            (None, Some(cov)) => {
                let mut out = Vec::new();
                for (x, sieves) in cov {
                    for members in sieves {
                        out.push(SieveDoc { at: x.clone(), members: members.clone() }.to_sieve(c)?);
                    }
                }
                Ok(out)
            }
            _ => Err(Error::InvalidDocument("a topology needs exactly one of `generators` and `covering`".into())),
        }
    }

    pub fn to_notion(&self, c: &Arc<FiniteCategory>) -> Result<StableNotion> {
        StableNotion::new(c.clone(), self.generator_sieves(c)?)
    }

    /// The generated topology for a generators block; the covering system
    /// exactly as listed otherwise, axioms unchecked.
    pub fn to_topology(&self, c: &Arc<FiniteCategory>) -> Result<Topology> {
        let gens = self.generator_sieves(c)?;
        if self.generators.is_some() {
            Ok(enumerate_topology(&StableNotion::new(c.clone(), gens)?))
        } else {
            Topology::new(c.clone(), gens)
        }
    }
}
