//! Presheaves of finite sets on a finite category: sheaf and separation
//! conditions, the plus construction, sheafification and closure of
//! subpresheaves.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::category::{FiniteCategory, MorId, ObjId};
use crate::constructions::assemble;
use crate::error::{Error, Result};
use crate::functor::FunctorMap;
use crate::sieve::Sieve;
use crate::topology::{
    same_base, state_search, validate_multicovering, Certificate, CoveringPredicate, LeafReason, StableNotion, Topology,
    TreeOutcome,
};

/// A functor `Cᵒᵖ → FinSet`. Elements of `P(X)` are indices into the
/// label list of `X`; `restriction[f]` maps `P(cod f)` to `P(dom f)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presheaf {
    base: Arc<FiniteCategory>,
    labels: Vec<Vec<String>>,
    restriction: Vec<Vec<usize>>,
}

/// Presheaf file format. Each restriction entry lists, for the sections of
/// the codomain in order, the label of their restriction. Identities may be
/// omitted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresheafDoc {
    pub sections: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub restriction: BTreeMap<String, Vec<String>>,
}

fn numbered(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

impl Presheaf {
    pub fn new(base: Arc<FiniteCategory>, labels: Vec<Vec<String>>, restriction: Vec<Vec<usize>>) -> Result<Self> {
        let p = Presheaf { base, labels, restriction };
        let report = p.violations();
        if report.is_empty() {
            Ok(p)
        } else {
            Err(Error::InvalidPresheaf(report))
        }
    }

    /// Sections labelled `0..n`.
    pub fn from_sizes(base: Arc<FiniteCategory>, sizes: &[usize], restriction: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(base, sizes.iter().map(|&n| numbered(n)).collect(), restriction)
    }

    /// One section `*` everywhere.
    pub fn terminal(base: Arc<FiniteCategory>) -> Self {
        let labels = vec![vec!["*".to_string()]; base.object_count()];
        let restriction = vec![vec![0]; base.morphism_count()];
        Presheaf { base, labels, restriction }
    }

    pub fn empty(base: Arc<FiniteCategory>) -> Self {
        let labels = vec![Vec::new(); base.object_count()];
        let restriction = vec![Vec::new(); base.morphism_count()];
        Presheaf { base, labels, restriction }
    }

    /// `y(x)`: sections at `Y` are the morphisms `Y → x`, restricted by
    /// precomposition.
    pub fn representable(base: Arc<FiniteCategory>, x: ObjId) -> Self {
        let homs: Vec<Vec<MorId>> = base.object_ids().map(|y| base.hom(y, x).collect()).collect();
        let labels = homs.iter().map(|h| h.iter().map(|&g| base.morphism_name(g).to_string()).collect()).collect();
        let restriction = base
            .morphism_ids()
            .map(|f| {
                let target = &homs[base.dom(f).0];
                homs[base.cod(f).0]
                    .iter()
                    .map(|&g| target.iter().position(|&k| k == base.compose(g, f)).expect("composite is a morphism into x"))
                    .collect()
            })
            .collect();
        Presheaf { base, labels, restriction }
    }

    /// Index of `g : Y → x` among the sections of `y(x)` at `Y`.
    pub fn representable_index(c: &FiniteCategory, x: ObjId, g: MorId) -> usize {
        c.hom(c.dom(g), x).position(|k| k == g).expect("morphism into x")
    }

    pub fn from_doc(base: Arc<FiniteCategory>, doc: &PresheafDoc) -> Result<Self> {
        let mut report = Vec::new();
        for name in doc.sections.keys() {
            if base.object(name).is_err() {
                report.push(format!("unknown object `{name}`"));
            }
        }
        for name in doc.restriction.keys() {
            if base.morphism(name).is_err() {
                report.push(format!("unknown morphism `{name}`"));
            }
        }
        let mut labels = Vec::new();
        for x in base.object_ids() {
            match doc.sections.get(base.object_name(x)) {
                Some(ls) => {
                    if ls.iter().collect::<BTreeSet<_>>().len() != ls.len() {
                        report.push(format!("sections of `{}` repeat a label", base.object_name(x)));
                    }
                    labels.push(ls.clone());
                }
                None => {
                    report.push(format!("object `{}` has no sections entry", base.object_name(x)));
                    labels.push(Vec::new());
                }
            }
        }
        let mut restriction = Vec::new();
        for f in base.morphism_ids() {
            let (d, c) = (base.dom(f).0, base.cod(f).0);
            let name = base.morphism_name(f);
            let entry = match doc.restriction.get(name) {
                Some(images) => {
                    if images.len() != labels[c].len() {
                        report.push(format!("restriction of `{name}` has {} entries, expected {}", images.len(), labels[c].len()));
                    }
                    images
                        .iter()
                        .map(|l| {
                            labels[d].iter().position(|k| k == l).unwrap_or_else(|| {
                                report.push(format!("restriction of `{name}` names unknown section `{l}`"));
                                0
                            })
                        })
                        .collect()
                }
                None if base.is_identity(f) => (0..labels[c].len()).collect(),
                None => {
                    report.push(format!("morphism `{name}` has no restriction entry"));
                    Vec::new()
                }
            };
            restriction.push(entry);
        }
        if !report.is_empty() {
            return Err(Error::InvalidPresheaf(report));
        }
        Self::new(base, labels, restriction)
    }

    pub fn to_doc(&self) -> PresheafDoc {
        let c = &self.base;
        PresheafDoc {
            sections: c.object_ids().map(|x| (c.object_name(x).to_string(), self.labels[x.0].clone())).collect(),
            restriction: c
                .morphism_ids()
                .filter(|&f| !c.is_identity(f))
                .map(|f| {
                    let images = self.restriction[f.0].iter().map(|&e| self.labels[c.dom(f).0][e].clone()).collect();
                    (c.morphism_name(f).to_string(), images)
                })
                .collect(),
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let c = &*self.base;
        let mut report = Vec::new();
        if self.labels.len() != c.object_count() || self.restriction.len() != c.morphism_count() {
            report.push("tables do not match the base category".into());
            return report;
        }
        for f in c.morphism_ids() {
            let (d, k) = (self.size(c.dom(f)), self.size(c.cod(f)));
            let r = &self.restriction[f.0];
            if r.len() != k || r.iter().any(|&e| e >= d) {
                report.push(format!("restriction of `{}` is not a map P({}) → P({})", c.morphism_name(f), c.object_name(c.cod(f)), c.object_name(c.dom(f))));
            }
        }
        if !report.is_empty() {
            return report;
        }
        for x in c.object_ids() {
            if self.restriction[c.id(x).0].iter().enumerate().any(|(i, &e)| i != e) {
                report.push(format!("restriction along the identity of `{}` is not the identity", c.object_name(x)));
            }
        }
        for g in c.morphism_ids() {
            for &f in c.hom_into(c.dom(g)) {
                let gf = c.compose(g, f);
                if (0..self.size(c.cod(g))).any(|e| self.restrict(gf, e) != self.restrict(f, self.restrict(g, e))) {
                    report.push(format!(
                        "restriction along `{}` ∘ `{}` is not the composite of restrictions",
                        c.morphism_name(g),
                        c.morphism_name(f)
                    ));
                }
            }
        }
        report
    }

    pub fn base(&self) -> &Arc<FiniteCategory> {
        &self.base
    }

    pub fn size(&self, x: ObjId) -> usize {
        self.labels[x.0].len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.labels.iter().map(Vec::len).collect()
    }

    pub fn labels(&self, x: ObjId) -> &[String] {
        &self.labels[x.0]
    }

    pub fn label(&self, x: ObjId, e: usize) -> &str {
        &self.labels[x.0][e]
    }

    pub fn element(&self, x: ObjId, label: &str) -> Option<usize> {
        self.labels[x.0].iter().position(|l| l == label)
    }

    /// `P(f)(e)` for `f : Y → X` and `e ∈ P(X)`.
    pub fn restrict(&self, f: MorId, e: usize) -> usize {
        self.restriction[f.0][e]
    }

    pub fn restriction_map(&self, f: MorId) -> &[usize] {
        &self.restriction[f.0]
    }

    /// The same presheaf with sections relabelled `0..n`.
    pub fn relabelled(&self) -> Presheaf {
        Presheaf { base: self.base.clone(), labels: self.sizes().into_iter().map(numbered).collect(), restriction: self.restriction.clone() }
    }
}

/// Every presheaf with the given section counts, in a fixed order.
pub fn all_presheaves(base: &Arc<FiniteCategory>, sizes: &[usize]) -> Result<Vec<Presheaf>> {
    let c = &**base;
    if sizes.len() != c.object_count() {
        return Err(Error::IndexOutOfRange { index: sizes.len(), len: c.object_count() });
    }
    let free: Vec<MorId> = c.morphism_ids().filter(|&f| !c.is_identity(f)).collect();
    let mut table: Vec<Option<Vec<usize>>> = c
        .morphism_ids()
        .map(|f| c.is_identity(f).then(|| (0..sizes[c.cod(f).0]).collect()))
        .collect();
    let mut out = Vec::new();
    fn functions(domain: usize, codomain: usize) -> Vec<Vec<usize>> {
        let mut all = vec![Vec::new()];
        for _ in 0..codomain {
            all = all.into_iter().flat_map(|v| (0..domain).map(move |e| [v.clone(), vec![e]].concat())).collect();
        }
        all
    }
    fn consistent(c: &FiniteCategory, table: &[Option<Vec<usize>>], f: MorId) -> bool {
        let check = |g: MorId, h: MorId| {
            let gh = c.compose(g, h);
            match (&table[g.0], &table[h.0], &table[gh.0]) {
                (Some(rg), Some(rh), Some(rgh)) => rg.iter().enumerate().all(|(e, &y)| rgh[e] == rh[y]),
                _ => true,
            }
        };
        c.hom_into(c.dom(f)).iter().all(|&h| check(f, h))
            && c.hom_from(c.cod(f)).iter().all(|&g| check(g, f))
            && c.morphism_ids().all(|g| c.cod(g) != c.dom(f) || c.hom_into(c.dom(g)).iter().all(|&h| check(g, h)))
    }
    fn go(c: &FiniteCategory, sizes: &[usize], free: &[MorId], k: usize, table: &mut Vec<Option<Vec<usize>>>, out: &mut Vec<Vec<Vec<usize>>>) {
        let Some(&f) = free.get(k) else {
            out.push(table.iter().map(|r| r.clone().expect("all assigned")).collect());
            return;
        };
        for r in functions(sizes[c.dom(f).0], sizes[c.cod(f).0]) {
            table[f.0] = Some(r);
            if consistent(c, table, f) {
                go(c, sizes, free, k + 1, table, out);
            }
        }
        table[f.0] = None;
    }
    let mut tables = Vec::new();
    go(c, sizes, &free, 0, &mut table, &mut tables);
    for restriction in tables {
        out.push(Presheaf { base: base.clone(), labels: sizes.iter().map(|&n| numbered(n)).collect(), restriction });
    }
    Ok(out)
}

/// A natural transformation, stored as one map per object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresheafMorphism {
    source: Presheaf,
    target: Presheaf,
    components: Vec<Vec<usize>>,
}

impl PresheafMorphism {
    pub fn new(source: Presheaf, target: Presheaf, components: Vec<Vec<usize>>) -> Result<Self> {
        if !same_base(source.base(), target.base()) {
            return Err(Error::BaseMismatch);
        }
        let c = source.base().clone();
        let mut report = Vec::new();
        if components.len() != c.object_count() {
            report.push("one component per object is required".to_string());
        } else {
            for x in c.object_ids() {
                let comp = &components[x.0];
                if comp.len() != source.size(x) || comp.iter().any(|&e| e >= target.size(x)) {
                    report.push(format!("component at `{}` is not a map of sections", c.object_name(x)));
                }
            }
            if report.is_empty() {
                for f in c.morphism_ids() {
                    let (y, x) = (c.dom(f), c.cod(f));
                    if (0..source.size(x)).any(|e| components[y.0][source.restrict(f, e)] != target.restrict(f, components[x.0][e])) {
                        report.push(format!("not natural along `{}`", c.morphism_name(f)));
                    }
                }
            }
        }
        if report.is_empty() {
            Ok(PresheafMorphism { source, target, components })
        } else {
            Err(Error::InvalidPresheaf(report))
        }
    }

    pub fn identity(p: &Presheaf) -> Self {
        let components = p.sizes().into_iter().map(|n| (0..n).collect()).collect();
        PresheafMorphism { source: p.clone(), target: p.clone(), components }
    }

    pub fn source(&self) -> &Presheaf {
        &self.source
    }

    pub fn target(&self) -> &Presheaf {
        &self.target
    }

    pub fn component(&self, x: ObjId) -> &[usize] {
        &self.components[x.0]
    }

    pub fn apply(&self, x: ObjId, e: usize) -> usize {
        self.components[x.0][e]
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &PresheafMorphism) -> Result<PresheafMorphism> {
        if first.target.sizes() != self.source.sizes() || !same_base(first.target.base(), self.source.base()) {
            return Err(Error::BaseMismatch);
        }
        let components = first.components.iter().enumerate().map(|(x, comp)| comp.iter().map(|&e| self.components[x][e]).collect()).collect();
        Ok(PresheafMorphism { source: first.source.clone(), target: self.target.clone(), components })
    }

    pub fn is_iso(&self) -> bool {
        self.components.iter().enumerate().all(|(x, comp)| {
            comp.len() == self.target.size(ObjId(x)) && comp.iter().collect::<HashSet<_>>().len() == comp.len()
        })
    }
}

/// Every natural transformation `p → q`.
pub fn presheaf_morphisms(p: &Presheaf, q: &Presheaf) -> Result<Vec<PresheafMorphism>> {
    if !same_base(p.base(), q.base()) {
        return Err(Error::BaseMismatch);
    }
    let c = p.base().clone();
    let n = c.object_count();
    let mut comps: Vec<Option<Vec<usize>>> = vec![None; n];
    let mut out = Vec::new();
    fn natural_at(c: &FiniteCategory, p: &Presheaf, q: &Presheaf, comps: &[Option<Vec<usize>>], x: ObjId) -> bool {
        let check = |f: MorId| match (&comps[c.dom(f).0], &comps[c.cod(f).0]) {
            (Some(cy), Some(cx)) => (0..p.size(c.cod(f))).all(|e| cy[p.restrict(f, e)] == q.restrict(f, cx[e])),
            _ => true,
        };
        c.hom_into(x).iter().chain(c.hom_from(x)).all(|&f| check(f))
    }
    fn go(c: &FiniteCategory, p: &Presheaf, q: &Presheaf, k: usize, comps: &mut Vec<Option<Vec<usize>>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if k == c.object_count() {
            out.push(comps.iter().map(|m| m.clone().expect("assigned")).collect());
            return;
        }
        let x = ObjId(k);
        let (dn, cn) = (p.size(x), q.size(x));
        let mut current = vec![0; dn];
        loop {
            if dn == 0 || cn > 0 {
                comps[k] = Some(current.clone());
                if natural_at(c, p, q, comps, x) {
                    go(c, p, q, k + 1, comps, out);
                }
            }
            let mut i = 0;
            while i < dn {
                current[i] += 1;
                if current[i] < cn {
                    break;
                }
                current[i] = 0;
                i += 1;
            }
            if i == dn || cn == 0 {
                break;
            }
        }
        comps[k] = None;
    }
    let mut raw = Vec::new();
    go(&c, p, q, 0, &mut comps, &mut raw);
    out.extend(raw.into_iter().map(|components| PresheafMorphism { source: p.clone(), target: q.clone(), components }));
    Ok(out)
}

/// A compatible choice of sections over a sieve.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatchingFamily {
    pub over: Sieve,
    /// `(member, section of its domain)`, in member order.
    pub values: Vec<(MorId, usize)>,
}

impl MatchingFamily {
    pub fn value(&self, f: MorId) -> Option<usize> {
        self.values.iter().find(|(g, _)| *g == f).map(|&(_, v)| v)
    }
}

/// Members of `s` and the value vectors of all matching families on it.
fn family_table(p: &Presheaf, s: &Sieve) -> (Vec<MorId>, Vec<Vec<usize>>) {
    let c = &**p.base();
    let members: Vec<MorId> = s.members().collect();
    let pos: HashMap<MorId, usize> = members.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    // Largest principal sieves first so that later values are forced.
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(c.hom_into(c.dom(members[i])).len()));
    let rank: Vec<usize> = {
        let mut r = vec![0; members.len()];
        for (k, &i) in order.iter().enumerate() {
            r[i] = k;
        }
        r
    };
    // checks[k]: constraints (i, g, j) meaning value[j] = P(g)(value[i]), whose later end has rank k.
    let mut checks: Vec<Vec<(usize, MorId, usize)>> = vec![Vec::new(); members.len()];
    for (i, &f) in members.iter().enumerate() {
        for &g in c.hom_into(c.dom(f)) {
            let j = pos[&c.compose(f, g)];
            checks[rank[i].max(rank[j])].push((i, g, j));
        }
    }
    let mut values = vec![usize::MAX; members.len()];
    let mut out = Vec::new();
    fn go(
        p: &Presheaf,
        c: &FiniteCategory,
        members: &[MorId],
        order: &[usize],
        checks: &[Vec<(usize, MorId, usize)>],
        k: usize,
        values: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if k == order.len() {
            out.push(values.clone());
            return;
        }
        let i = order[k];
        for v in 0..p.size(c.dom(members[i])) {
            values[i] = v;
            if checks[k].iter().all(|&(a, g, b)| values[b] == p.restrict(g, values[a])) {
                go(p, c, members, order, checks, k + 1, values, out);
            }
        }
        values[i] = usize::MAX;
    }
    go(p, c, &members, &order, &checks, 0, &mut values, &mut out);
    out.sort();
    (members, out)
}

/// All matching families for `p` on `s`.
pub fn matching_families(p: &Presheaf, s: &Sieve) -> Vec<MatchingFamily> {
    let (members, table) = family_table(p, s);
    table
        .into_iter()
        .map(|vals| MatchingFamily { over: s.clone(), values: members.iter().copied().zip(vals).collect() })
        .collect()
}

/// The family `f ↦ P(f)(e)` on the members of `s`.
fn restriction_vector(p: &Presheaf, members: &[MorId], e: usize) -> Vec<usize> {
    members.iter().map(|&f| p.restrict(f, e)).collect()
}

/// Whether `P(X) → MatchingFamilies(s, P)` is a bijection.
pub fn satisfies_sheaf_condition(p: &Presheaf, s: &Sieve) -> bool {
    let (members, table) = family_table(p, s);
    let images: HashSet<Vec<usize>> = (0..p.size(s.at())).map(|e| restriction_vector(p, &members, e)).collect();
    images.len() == p.size(s.at()) && table.len() == images.len()
}

/// Whether `P(X) → MatchingFamilies(s, P)` is injective.
pub fn separated_at(p: &Presheaf, s: &Sieve) -> bool {
    let members: Vec<MorId> = s.members().collect();
    let images: HashSet<Vec<usize>> = (0..p.size(s.at())).map(|e| restriction_vector(p, &members, e)).collect();
    images.len() == p.size(s.at())
}

fn check_base(p: &Presheaf, j: &Topology) -> Result<()> {
    if same_base(p.base(), j.base()) {
        Ok(())
    } else {
        Err(Error::BaseMismatch)
    }
}

/// First covering sieve, by object and then sieve order, where gluing fails.
pub fn sheaf_failure(p: &Presheaf, j: &Topology) -> Result<Option<Sieve>> {
    check_base(p, j)?;
    Ok(j.sieves().find(|s| !satisfies_sheaf_condition(p, s)).cloned())
}

pub fn is_sheaf(p: &Presheaf, j: &Topology) -> Result<bool> {
    Ok(sheaf_failure(p, j)?.is_none())
}

pub fn is_separated(p: &Presheaf, j: &Topology) -> Result<bool> {
    check_base(p, j)?;
    Ok(j.sieves().all(|s| separated_at(p, s)))
}

/// The meet of all covering sieves at `x`, itself covering.
pub fn least_covering_sieve(j: &Topology, x: ObjId) -> Sieve {
    let c = j.base();
    j.covering_at(x).iter().fold(Sieve::maximal(c, x), |acc, s| acc.meet(s).expect("same target"))
}

/// A presheaf with its unit map `p → result`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WithUnit {
    pub presheaf: Presheaf,
    pub unit: PresheafMorphism,
}

/// `P⁺(X)` is the colimit of matching families over covering sieves of
/// `X`. Finite topologies have a least covering sieve `M_X`, which is
/// terminal in that diagram, so `P⁺(X)` is the set of families on `M_X`.
pub fn plus_construction(p: &Presheaf, j: &Topology) -> Result<WithUnit> {
    check_base(p, j)?;
    let c = p.base().clone();
    let tables: Vec<(Sieve, Vec<MorId>, Vec<Vec<usize>>)> = c
        .object_ids()
        .map(|x| {
            let m = least_covering_sieve(j, x);
            let (members, table) = family_table(p, &m);
            (m, members, table)
        })
        .collect();
    let index: Vec<HashMap<&[usize], usize>> =
        tables.iter().map(|(_, _, t)| t.iter().enumerate().map(|(i, v)| (v.as_slice(), i)).collect()).collect();
    let labels: Vec<Vec<String>> = tables
        .iter()
        .map(|(_, members, table)| {
            table
                .iter()
                .map(|vals| {
                    let parts: Vec<&str> = members.iter().zip(vals).map(|(&f, &v)| p.label(c.dom(f), v)).collect();
                    format!("{{{}}}", parts.join(","))
                })
                .collect()
        })
        .collect();
    let restriction: Vec<Vec<usize>> = c
        .morphism_ids()
        .map(|f| {
            let (y, x) = (c.dom(f), c.cod(f));
            let (_, mx, tx) = &tables[x.0];
            let (_, my, _) = &tables[y.0];
            let pos: HashMap<MorId, usize> = mx.iter().enumerate().map(|(i, &g)| (g, i)).collect();
            tx.iter()
                .map(|vals| {
                    let pulled: Vec<usize> = my.iter().map(|&m| vals[pos[&c.compose(f, m)]]).collect();
                    index[y.0][pulled.as_slice()]
                })
                .collect()
        })
        .collect();
    let plus = Presheaf { base: c.clone(), labels, restriction };
    let components = c
        .object_ids()
        .map(|x| {
            let members = &tables[x.0].1;
            (0..p.size(x)).map(|e| index[x.0][restriction_vector(p, members, e).as_slice()]).collect()
        })
        .collect();
    let unit = PresheafMorphism { source: p.clone(), target: plus.clone(), components };
    Ok(WithUnit { presheaf: plus, unit })
}

/// `(P⁺)⁺` with the composite unit.
pub fn sheafify(p: &Presheaf, j: &Topology) -> Result<WithUnit> {
    let once = plus_construction(p, j)?;
    let twice = plus_construction(&once.presheaf, j)?;
    let unit = twice.unit.after(&once.unit)?;
    Ok(WithUnit { presheaf: twice.presheaf, unit })
}

/// A choice of sections closed under restriction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubPresheaf {
    parent: Presheaf,
    chosen: Vec<BTreeSet<usize>>,
}

impl SubPresheaf {
    pub fn new(parent: Presheaf, chosen: Vec<BTreeSet<usize>>) -> Result<Self> {
        let c = parent.base().clone();
        if chosen.len() != c.object_count() {
            return Err(Error::InvalidPresheaf(vec!["one chosen set per object is required".into()]));
        }
        let mut report = Vec::new();
        for x in c.object_ids() {
            if let Some(&e) = chosen[x.0].iter().find(|&&e| e >= parent.size(x)) {
                report.push(format!("`{e}` is not a section at `{}`", c.object_name(x)));
            }
        }
        if report.is_empty() {
            for f in c.morphism_ids() {
                if chosen[c.cod(f).0].iter().any(|&e| !chosen[c.dom(f).0].contains(&parent.restrict(f, e))) {
                    report.push(format!("chosen sections are not closed under restriction along `{}`", c.morphism_name(f)));
                }
            }
        }
        if report.is_empty() {
            Ok(SubPresheaf { parent, chosen })
        } else {
            Err(Error::InvalidPresheaf(report))
        }
    }

    pub fn full(parent: Presheaf) -> Self {
        let chosen = parent.sizes().into_iter().map(|n| (0..n).collect()).collect();
        SubPresheaf { parent, chosen }
    }

    pub fn empty(parent: Presheaf) -> Self {
        let chosen = vec![BTreeSet::new(); parent.base().object_count()];
        SubPresheaf { parent, chosen }
    }

    /// `s` as a subpresheaf of the representable of its target.
    pub fn of_sieve(c: &Arc<FiniteCategory>, s: &Sieve) -> Self {
        let parent = Presheaf::representable(c.clone(), s.at());
        let mut chosen = vec![BTreeSet::new(); c.object_count()];
        for f in s.members() {
            chosen[c.dom(f).0].insert(Presheaf::representable_index(c, s.at(), f));
        }
        SubPresheaf { parent, chosen }
    }

    pub fn parent(&self) -> &Presheaf {
        &self.parent
    }

    pub fn chosen(&self, x: ObjId) -> &BTreeSet<usize> {
        &self.chosen[x.0]
    }

    pub fn contains(&self, x: ObjId, e: usize) -> bool {
        self.chosen[x.0].contains(&e)
    }

    pub fn is_subset(&self, other: &SubPresheaf) -> bool {
        self.chosen.iter().zip(&other.chosen).all(|(a, b)| a.is_subset(b))
    }

    pub fn is_full(&self) -> bool {
        self.chosen.iter().enumerate().all(|(x, s)| s.len() == self.parent.size(ObjId(x)))
    }

    /// `{ e′ | h(e′) ∈ self }` inside the source of `h`.
    pub fn pullback(&self, h: &PresheafMorphism) -> Result<SubPresheaf> {
        if h.target() != &self.parent {
            return Err(Error::BaseMismatch);
        }
        let chosen = h
            .source()
            .base()
            .object_ids()
            .map(|x| (0..h.source().size(x)).filter(|&e| self.contains(x, h.apply(x, e))).collect())
            .collect();
        Ok(SubPresheaf { parent: h.source().clone(), chosen })
    }

    /// `{ f into X | P(f)(e) is chosen }`.
    pub fn locality_sieve(&self, x: ObjId, e: usize) -> Sieve {
        let c = self.parent.base();
        let members = c.hom_into(x).iter().copied().filter(|&f| self.contains(c.dom(f), self.parent.restrict(f, e)));
        Sieve::new(c, x, members).expect("chosen sections are closed under restriction")
    }
}

/// Every subpresheaf of `p`, by subset enumeration over all sections.
pub fn all_subpresheaves(p: &Presheaf, guard: usize) -> Result<Vec<SubPresheaf>> {
    let c = p.base();
    let elements: Vec<(ObjId, usize)> = c.object_ids().flat_map(|x| (0..p.size(x)).map(move |e| (x, e))).collect();
    if elements.len() > guard.min(24) {
        return Err(Error::GuardExceeded { what: "subpresheaf enumeration", needed: elements.len(), bound: guard.min(24) });
    }
    let mut out = Vec::new();
    for mask in 0u32..(1 << elements.len()) {
        let mut chosen = vec![BTreeSet::new(); c.object_count()];
        for (i, &(x, e)) in elements.iter().enumerate() {
            if mask >> i & 1 == 1 {
                chosen[x.0].insert(e);
            }
        }
        if let Ok(q) = SubPresheaf::new(p.clone(), chosen) {
            out.push(q);
        }
    }
    Ok(out)
}

/// Least fixed point of adding a section whenever its locality sieve is
/// admitted by `j`. Each added section brings its restrictions along, which
/// stability would add anyway.
pub fn close_subpresheaf(q: &SubPresheaf, j: &impl CoveringPredicate) -> Result<SubPresheaf> {
    let p = &q.parent;
    if !same_base(p.base(), j.base()) {
        return Err(Error::BaseMismatch);
    }
    let c = p.base().clone();
    let mut current = q.clone();
    loop {
        let mut changed = false;
        for x in c.object_ids() {
            for e in 0..p.size(x) {
                if !current.contains(x, e) && j.admits(&current.locality_sieve(x, e)) {
                    for &f in c.hom_into(x) {
                        current.chosen[c.dom(f).0].insert(p.restrict(f, e));
                    }
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(current);
        }
    }
}

/// Searches for a multi-covering of `x` along whose every leaf the section
/// `e` either restricts into `q` or the empty family covers.
pub fn tree_close_membership(q: &SubPresheaf, j: &StableNotion, x: ObjId, e: usize, depth_bound: usize) -> Result<TreeOutcome> {
    let p = &q.parent;
    if !same_base(p.base(), j.base()) {
        return Err(Error::BaseMismatch);
    }
    if e >= p.size(x) {
        return Err(Error::NotInCarrier { element: e, len: p.size(x) });
    }
    Ok(state_search(
        j,
        x,
        e,
        |y, &s| q.contains(y, s),
        |&s, g| p.restrict(g, s),
        |_, &s, _| LeafReason::Chosen { element: s },
        depth_bound,
    ))
}

/// Re-checks a membership certificate produced by [`tree_close_membership`].
pub fn validate_membership_certificate(q: &SubPresheaf, j: &StableNotion, x: ObjId, e: usize, cert: &Certificate) -> Vec<String> {
    let (p, c) = (&q.parent, j.base());
    let mut report = validate_multicovering(j, &cert.covering);
    if *cert.covering.root() != x {
        report.push("certificate root differs from the section's object".into());
    }
    if !report.is_empty() {
        return report;
    }
    for (n, a) in cert.covering.tree().leaves() {
        let Some(w) = cert.leaves.iter().find(|w| w.level == n && w.index == a) else {
            report.push(format!("leaf ({n},{a}) has no witness"));
            continue;
        };
        let y = *cert.covering.object(n, a);
        let branch = cert.covering.branch(j, n, a);
        let ok = match w.reason {
            LeafReason::Chosen { element } => element == p.restrict(branch, e) && q.contains(y, element),
            LeafReason::EmptyFamily => j.is_stable_covering(&Sieve::empty(c, y)),
            LeafReason::Member { .. } => false,
        };
        if !ok {
            report.push(format!("leaf ({n},{a}) at `{}` is not justified", c.object_name(y)));
        }
    }
    report
}

/// The category of elements with its projection to the base.
///
/// Objects `(X,e)`; a morphism `f:(Y,e′)->(X,e)` for each `f : Y → X` with
/// `P(f)(e) = e′`.
pub fn category_of_elements(p: &Presheaf) -> Result<(Arc<FiniteCategory>, FunctorMap)> {
    let c = p.base().clone();
    let objects: Vec<(ObjId, usize)> = c.object_ids().flat_map(|x| (0..p.size(x)).map(move |e| (x, e))).collect();
    let obj_index: HashMap<(ObjId, usize), usize> = objects.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let names: Vec<String> = objects.iter().map(|&(x, e)| format!("({},{})", c.object_name(x), p.label(x, e))).collect();
    let mut morphisms = Vec::new();
    let mut decls = Vec::new();
    for f in c.morphism_ids() {
        for e in 0..p.size(c.cod(f)) {
            let (s, t) = (obj_index[&(c.dom(f), p.restrict(f, e))], obj_index[&(c.cod(f), e)]);
            morphisms.push((f, e));
            decls.push((format!("{}:{}->{}", c.morphism_name(f), names[s], names[t]), s, t));
        }
    }
    let mor_index: HashMap<(MorId, usize), usize> = morphisms.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let identity: Vec<usize> = objects.iter().map(|&(x, e)| mor_index[&(c.id(x), e)]).collect();
    let category = Arc::new(assemble(names, &decls, &identity, |g, f| {
        let ((gm, ge), (fm, _)) = (morphisms[g], morphisms[f]);
        mor_index[&(c.compose(gm, fm), ge)]
    })?);
    let projection = FunctorMap::new(
        category.clone(),
        c.clone(),
        objects.iter().map(|&(x, _)| x).collect(),
        morphisms.iter().map(|&(f, _)| f).collect(),
    )?;
    Ok((category, projection))
}
