//! Explicit finite categories with a fully materialised composition table.
//!
//! A [`CategoryDoc`] is the raw, unvalidated document form (what files
//! contain); a [`FiniteCategory`] can only be obtained from a document that
//! passes [`validate_category`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ObjId(pub usize);

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MorId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismDecl {
    pub id: String,
    pub dom: String,
    pub cod: String,
}

/// Category file format.
///
/// `composition` holds `[g, f, g∘f]` triples and must cover every composable
/// pair, identities included.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryDoc {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismDecl>,
    pub identities: BTreeMap<String, String>,
    pub composition: Vec<[String; 3]>,
}

impl CategoryDoc {
    /// Replaces the entry for `(g, f)` (or appends one).
    pub fn set_composite(&mut self, g: &str, f: &str, gf: &str) {
        self.composition.retain(|t| !(t[0] == g && t[1] == f));
        self.composition.push([g.into(), f.into(), gf.into()]);
    }

    pub fn remove_composite(&mut self, g: &str, f: &str) {
        self.composition.retain(|t| !(t[0] == g && t[1] == f));
    }
}

/// One violated law, naming the offending morphisms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum CategoryViolation {
    DuplicateObject { object: String },
    DuplicateMorphism { morphism: String },
    UnknownObject { morphism: String, object: String },
    UnknownMorphism { morphism: String },
    MissingIdentity { object: String },
    IdentityNotEndo { object: String, morphism: String },
    NotComposable { g: String, f: String },
    WrongComposite { g: String, f: String, composite: String },
    Conflicting { g: String, f: String },
    Totality { g: String, f: String },
    UnitLaw { identity: String, morphism: String, composite: String },
    Associativity { h: String, g: String, f: String },
}

impl fmt::Display for CategoryViolation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        use CategoryViolation::*;
        match self {
            DuplicateObject { object } => write!(out, "duplicate object `{object}`"),
            DuplicateMorphism { morphism } => write!(out, "duplicate morphism `{morphism}`"),
            UnknownObject { morphism, object } => {
                write!(out, "morphism `{morphism}` refers to unknown object `{object}`")
            }
            UnknownMorphism { morphism } => write!(out, "unknown morphism `{morphism}`"),
            MissingIdentity { object } => write!(out, "object `{object}` has no identity"),
            IdentityNotEndo { object, morphism } => {
                write!(out, "identity `{morphism}` of `{object}` is not an endomorphism of it")
            }
            NotComposable { g, f } => write!(out, "`{g}` ∘ `{f}` listed but not composable"),
            WrongComposite { g, f, composite } => {
                write!(out, "`{g}` ∘ `{f}` = `{composite}` has the wrong domain or codomain")
            }
            Conflicting { g, f } => write!(out, "`{g}` ∘ `{f}` defined twice"),
            Totality { g, f } => write!(out, "`{g}` ∘ `{f}` is composable but undefined"),
            UnitLaw { identity, morphism, composite } => write!(
                out,
                "unit law fails: composing `{morphism}` with `{identity}` gives `{composite}`"
            ),
            Associativity { h, g, f } => {
                write!(out, "associativity fails on `{h}` ∘ `{g}` ∘ `{f}`")
            }
        }
    }
}

/// Checks every [`FiniteCategory`] invariant on a raw document.
///
/// Only the first failure of each composable pair is reported; associativity
/// is checked on triples whose four composites are all well formed.
pub fn validate_category(doc: &CategoryDoc) -> Vec<CategoryViolation> {
    use CategoryViolation::*;
    let mut report = Vec::new();

    let mut objects = HashMap::new();
    for (i, o) in doc.objects.iter().enumerate() {
        if objects.insert(o.as_str(), i).is_some() {
            report.push(DuplicateObject { object: o.clone() });
        }
    }
    let mut morphisms: HashMap<&str, (usize, usize, usize)> = HashMap::new();
    for (i, m) in doc.morphisms.iter().enumerate() {
        let dom = objects.get(m.dom.as_str());
        let cod = objects.get(m.cod.as_str());
        for (side, name) in [(dom, &m.dom), (cod, &m.cod)] {
            if side.is_none() {
                report.push(UnknownObject { morphism: m.id.clone(), object: name.clone() });
            }
        }
        if let (Some(&d), Some(&c)) = (dom, cod) {
            if morphisms.insert(m.id.as_str(), (i, d, c)).is_some() {
                report.push(DuplicateMorphism { morphism: m.id.clone() });
            }
        }
    }
    if !report.is_empty() {
        return report;
    }

    let mut identity_of = vec![None; doc.objects.len()];
    for (o, &i) in &objects {
        match doc.identities.get(*o) {
            None => report.push(MissingIdentity { object: o.to_string() }),
            Some(m) => match morphisms.get(m.as_str()) {
                None => report.push(UnknownMorphism { morphism: m.clone() }),
                Some(&(mi, d, c)) if d == i && c == i => identity_of[i] = Some(mi),
                Some(_) => report.push(IdentityNotEndo { object: o.to_string(), morphism: m.clone() }),
            },
        }
    }
    for o in doc.identities.keys() {
        if !objects.contains_key(o.as_str()) {
            report.push(UnknownObject { morphism: doc.identities[o].clone(), object: o.clone() });
        }
    }
    report.sort_by_key(|v| v.to_string());
    if !report.is_empty() {
        return report;
    }
    let is_identity: BTreeSet<usize> = identity_of.iter().flatten().copied().collect();

    let n = doc.morphisms.len();
    let name = |i: usize| doc.morphisms[i].id.clone();
    let shape = |i: usize| (doc.morphisms[i].id.as_str(), morphisms[doc.morphisms[i].id.as_str()]);
    let mut table: Vec<Option<usize>> = vec![None; n * n];
    let mut bad = vec![false; n * n];

    let mut listed = BTreeSet::new();
    for [g, f, gf] in &doc.composition {
        let lookup = |m: &String| morphisms.get(m.as_str()).copied();
        let (Some((gi, gd, _)), Some((fi, _, fc)), Some((ci, cd, cc))) = (lookup(g), lookup(f), lookup(gf))
        else {
            for m in [g, f, gf] {
                if !morphisms.contains_key(m.as_str()) {
                    report.push(UnknownMorphism { morphism: m.clone() });
                }
            }
            continue;
        };
        if gd != fc {
            report.push(NotComposable { g: g.clone(), f: f.clone() });
            continue;
        }
        if !listed.insert((gi, fi)) {
            if table[gi * n + fi] != Some(ci) {
                report.push(Conflicting { g: g.clone(), f: f.clone() });
                bad[gi * n + fi] = true;
            }
            continue;
        }
        table[gi * n + fi] = Some(ci);
        let (_, (_, fd, _)) = shape(fi);
        let (_, (_, _, gc)) = shape(gi);
        if is_identity.contains(&gi) && ci != fi {
            report.push(UnitLaw { identity: g.clone(), morphism: f.clone(), composite: gf.clone() });
            bad[gi * n + fi] = true;
        } else if is_identity.contains(&fi) && ci != gi {
            report.push(UnitLaw { identity: f.clone(), morphism: g.clone(), composite: gf.clone() });
            bad[gi * n + fi] = true;
        } else if cd != fd || cc != gc {
            report.push(WrongComposite { g: g.clone(), f: f.clone(), composite: gf.clone() });
            bad[gi * n + fi] = true;
        }
    }

    for gi in 0..n {
        for fi in 0..n {
            let (_, (_, gd, _)) = shape(gi);
            let (_, (_, _, fc)) = shape(fi);
            if gd == fc && table[gi * n + fi].is_none() {
                report.push(Totality { g: name(gi), f: name(fi) });
                bad[gi * n + fi] = true;
            }
        }
    }

    let good = |g: usize, f: usize| -> Option<usize> {
        if bad[g * n + f] {
            None
        } else {
            table[g * n + f]
        }
    };
    for h in 0..n {
        for g in 0..n {
            let Some(hg) = good(h, g) else { continue };
            for f in 0..n {
                let Some(gf) = good(g, f) else { continue };
                let (Some(l), Some(r)) = (good(hg, f), good(h, gf)) else { continue };
                if l != r {
                    report.push(Associativity { h: name(h), g: name(g), f: name(f) });
                }
            }
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Morphism {
    name: String,
    dom: ObjId,
    cod: ObjId,
}

/// A validated finite category. Immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteCategory {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identity: Vec<MorId>,
    table: Vec<Option<MorId>>,
    hom_into: Vec<Vec<MorId>>,
    hom_from: Vec<Vec<MorId>>,
    object_index: HashMap<String, ObjId>,
    morphism_index: HashMap<String, MorId>,
}

impl FiniteCategory {
    pub fn from_doc(doc: &CategoryDoc) -> Result<Self> {
        let report = validate_category(doc);
        if !report.is_empty() {
            return Err(Error::InvalidCategory(report.iter().map(|v| v.to_string()).collect()));
        }
        let object_index: HashMap<String, ObjId> =
            doc.objects.iter().enumerate().map(|(i, o)| (o.clone(), ObjId(i))).collect();
        let morphism_index: HashMap<String, MorId> =
            doc.morphisms.iter().enumerate().map(|(i, m)| (m.id.clone(), MorId(i))).collect();
        let morphisms: Vec<Morphism> = doc
            .morphisms
            .iter()
            .map(|m| Morphism { name: m.id.clone(), dom: object_index[&m.dom], cod: object_index[&m.cod] })
            .collect();
        let identity = doc.objects.iter().map(|o| morphism_index[&doc.identities[o]]).collect();
        let n = morphisms.len();
        let mut table = vec![None; n * n];
        for [g, f, gf] in &doc.composition {
            table[morphism_index[g].0 * n + morphism_index[f].0] = Some(morphism_index[gf]);
        }
        let mut hom_into = vec![Vec::new(); doc.objects.len()];
        let mut hom_from = vec![Vec::new(); doc.objects.len()];
        for (i, m) in morphisms.iter().enumerate() {
            hom_into[m.cod.0].push(MorId(i));
            hom_from[m.dom.0].push(MorId(i));
        }
        Ok(FiniteCategory {
            objects: doc.objects.clone(),
            morphisms,
            identity,
            table,
            hom_into,
            hom_from,
            object_index,
            morphism_index,
        })
    }

    pub fn to_doc(&self) -> CategoryDoc {
        let mut composition = Vec::new();
        for g in self.morphism_ids() {
            for &f in &self.hom_into[self.dom(g).0] {
                let gf = self.compose(g, f);
                composition.push([self.morphism_name(g).into(), self.morphism_name(f).into(), self.morphism_name(gf).into()]);
            }
        }
        CategoryDoc {
            objects: self.objects.clone(),
            morphisms: self
                .morphisms
                .iter()
                .map(|m| MorphismDecl {
                    id: m.name.clone(),
                    dom: self.objects[m.dom.0].clone(),
                    cod: self.objects[m.cod.0].clone(),
                })
                .collect(),
            identities: self
                .object_ids()
                .map(|o| (self.object_name(o).to_string(), self.morphism_name(self.id(o)).to_string()))
                .collect(),
            composition,
        }
    }

    /// Builds the category of a finite preorder given by generating pairs
    /// `(x, y)` meaning `x ≤ y`. Morphisms are named `x->y` and `id_x`.
    pub fn from_poset(elements: &[&str], relations: &[(&str, &str)]) -> Result<Self> {
        let n = elements.len();
        let pos: HashMap<&str, usize> = elements.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let mut leq = vec![vec![false; n]; n];
        for i in 0..n {
            leq[i][i] = true;
        }
        for (x, y) in relations {
            let xi = *pos.get(x).ok_or_else(|| Error::UnknownObject(x.to_string()))?;
            let yi = *pos.get(y).ok_or_else(|| Error::UnknownObject(y.to_string()))?;
            leq[xi][yi] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if leq[i][k] && leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
        let name = |i: usize, j: usize| {
            if i == j {
                format!("id_{}", elements[i])
            } else {
                format!("{}->{}", elements[i], elements[j])
            }
        };
        let mut doc = CategoryDoc { objects: elements.iter().map(|e| e.to_string()).collect(), ..Default::default() };
        for i in 0..n {
            for j in 0..n {
                if leq[i][j] {
                    doc.morphisms.push(MorphismDecl { id: name(i, j), dom: elements[i].into(), cod: elements[j].into() });
                }
            }
            doc.identities.insert(elements[i].into(), name(i, i));
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if leq[i][j] && leq[j][k] {
                        doc.composition.push([name(j, k), name(i, j), name(i, k)]);
                    }
                }
            }
        }
        Self::from_doc(&doc)
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn object_ids(&self) -> impl Iterator<Item = ObjId> + '_ {
        (0..self.objects.len()).map(ObjId)
    }

    pub fn morphism_ids(&self) -> impl Iterator<Item = MorId> + '_ {
        (0..self.morphisms.len()).map(MorId)
    }

    pub fn object_name(&self, x: ObjId) -> &str {
        &self.objects[x.0]
    }

    pub fn morphism_name(&self, f: MorId) -> &str {
        &self.morphisms[f.0].name
    }

    pub fn object(&self, name: &str) -> Result<ObjId> {
        self.object_index.get(name).copied().ok_or_else(|| Error::UnknownObject(name.into()))
    }

    pub fn morphism(&self, name: &str) -> Result<MorId> {
        self.morphism_index.get(name).copied().ok_or_else(|| Error::UnknownMorphism(name.into()))
    }

    pub fn dom(&self, f: MorId) -> ObjId {
        self.morphisms[f.0].dom
    }

    pub fn cod(&self, f: MorId) -> ObjId {
        self.morphisms[f.0].cod
    }

    pub fn id(&self, x: ObjId) -> MorId {
        self.identity[x.0]
    }

    pub fn is_identity(&self, f: MorId) -> bool {
        self.identity[self.dom(f).0] == f
    }

    /// `g ∘ f`, or `None` when `cod f ≠ dom g`.
    pub fn try_compose(&self, g: MorId, f: MorId) -> Option<MorId> {
        self.table[g.0 * self.morphisms.len() + f.0]
    }

    /// `g ∘ f`. Panics on a non-composable pair.
    pub fn compose(&self, g: MorId, f: MorId) -> MorId {
        self.try_compose(g, f).unwrap_or_else(|| {
            panic!("`{}` ∘ `{}` is not composable", self.morphism_name(g), self.morphism_name(f))
        })
    }

    /// All morphisms with codomain `x`; always contains `id(x)`.
    pub fn hom_into(&self, x: ObjId) -> &[MorId] {
        &self.hom_into[x.0]
    }

    pub fn hom_from(&self, x: ObjId) -> &[MorId] {
        &self.hom_from[x.0]
    }

    pub fn hom(&self, x: ObjId, y: ObjId) -> impl Iterator<Item = MorId> + '_ {
        self.hom_into[y.0].iter().copied().filter(move |&f| self.dom(f) == x)
    }

    pub fn is_iso(&self, f: MorId) -> bool {
        self.inverse(f).is_some()
    }

    pub fn inverse(&self, f: MorId) -> Option<MorId> {
        let (x, y) = (self.dom(f), self.cod(f));
        self.hom(y, x).find(|&g| self.compose(g, f) == self.id(x) && self.compose(f, g) == self.id(y))
    }

    /// Whether `h` factors as `f ∘ g` for some `g`.
    pub fn factors_through(&self, h: MorId, f: MorId) -> bool {
        self.cod(h) == self.cod(f) && self.hom(self.dom(h), self.dom(f)).any(|g| self.compose(f, g) == h)
    }

    pub fn opposite(&self) -> FiniteCategory {
        let n = self.morphisms.len();
        let mut table = vec![None; n * n];
        for g in self.morphism_ids() {
            for f in self.morphism_ids() {
                // f ∘op g = g ∘ f
                table[f.0 * n + g.0] = self.try_compose(g, f);
            }
        }
        let morphisms: Vec<Morphism> =
            self.morphisms.iter().map(|m| Morphism { name: m.name.clone(), dom: m.cod, cod: m.dom }).collect();
        FiniteCategory {
            objects: self.objects.clone(),
            identity: self.identity.clone(),
            hom_into: self.hom_from.clone(),
            hom_from: self.hom_into.clone(),
            object_index: self.object_index.clone(),
            morphism_index: self.morphism_index.clone(),
            morphisms,
            table,
        }
    }
}

/// Reads `hom_into` by object name.
pub fn hom_into(c: &FiniteCategory, x: &str) -> Result<Vec<MorId>> {
    Ok(c.hom_into(c.object(x)?).to_vec())
}
