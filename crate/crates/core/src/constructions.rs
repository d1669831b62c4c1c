//! Categories built from other categories: products, comma categories,
//! Karoubi completions and a few small shapes.

use std::collections::HashMap;
use std::sync::Arc;

use crate::category::{CategoryDoc, FiniteCategory, MorId, MorphismDecl, ObjId};
use crate::error::{Error, Result};
use crate::functor::FunctorMap;

/// Assembles a category from index-based tables.
///
/// `compose(g, f)` is only called on composable pairs.
pub(crate) fn assemble(
    objects: Vec<String>,
    morphisms: &[(String, usize, usize)],
    identity: &[usize],
    mut compose: impl FnMut(usize, usize) -> usize,
) -> Result<FiniteCategory> {
    let mut doc = CategoryDoc {
        morphisms: morphisms
            .iter()
            .map(|(id, d, c)| MorphismDecl { id: id.clone(), dom: objects[*d].clone(), cod: objects[*c].clone() })
            .collect(),
        identities: identity.iter().enumerate().map(|(x, &m)| (objects[x].clone(), morphisms[m].0.clone())).collect(),
        objects,
        composition: Vec::new(),
    };
    let mut into: Vec<Vec<usize>> = vec![Vec::new(); doc.objects.len()];
    for (i, (_, _, c)) in morphisms.iter().enumerate() {
        into[*c].push(i);
    }
    for (g, (gname, gd, _)) in morphisms.iter().enumerate() {
        for &f in &into[*gd] {
            let gf = compose(g, f);
            doc.composition.push([gname.clone(), morphisms[f].0.clone(), morphisms[gf].0.clone()]);
        }
    }
    FiniteCategory::from_doc(&doc)
}

/// Discrete category on the given object names.
pub fn discrete(names: &[&str]) -> FiniteCategory {
    let objects = names.iter().map(|n| n.to_string()).collect();
    let morphisms: Vec<_> = names.iter().enumerate().map(|(i, n)| (format!("id_{n}"), i, i)).collect();
    let identity: Vec<usize> = (0..names.len()).collect();
    assemble(objects, &morphisms, &identity, |g, _| g).expect("discrete category is valid")
}

/// The product of a nonempty list of categories with its projections.
#[derive(Clone, Debug)]
pub struct ProductCategory {
    pub category: Arc<FiniteCategory>,
    pub factors: Vec<Arc<FiniteCategory>>,
    pub projections: Vec<FunctorMap>,
    object_tuples: Vec<Vec<ObjId>>,
    morphism_tuples: Vec<Vec<MorId>>,
    object_index: HashMap<Vec<ObjId>, ObjId>,
    morphism_index: HashMap<Vec<MorId>, MorId>,
}

impl ProductCategory {
    pub fn object_tuple(&self, x: ObjId) -> &[ObjId] {
        &self.object_tuples[x.0]
    }

    pub fn morphism_tuple(&self, f: MorId) -> &[MorId] {
        &self.morphism_tuples[f.0]
    }

    pub fn object_of(&self, tuple: &[ObjId]) -> Option<ObjId> {
        self.object_index.get(tuple).copied()
    }

    pub fn morphism_of(&self, tuple: &[MorId]) -> Option<MorId> {
        self.morphism_index.get(tuple).copied()
    }
}

fn tuples<T: Copy>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for list in lists {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                list.iter().map(move |&t| {
                    let mut next = prefix.clone();
                    next.push(t);
                    next
                })
            })
            .collect();
    }
    out
}

fn tuple_name<'a>(parts: impl Iterator<Item = &'a str>) -> String {
    format!("({})", parts.collect::<Vec<_>>().join(","))
}

pub fn product_category(cs: &[Arc<FiniteCategory>]) -> Result<ProductCategory> {
    if cs.is_empty() {
        return Err(Error::InvalidCategory(vec!["product of an empty list".into()]));
    }
    let object_tuples = tuples(&cs.iter().map(|c| c.object_ids().collect()).collect::<Vec<_>>());
    let morphism_tuples = tuples(&cs.iter().map(|c| c.morphism_ids().collect()).collect::<Vec<_>>());
    let object_index: HashMap<Vec<ObjId>, ObjId> =
        object_tuples.iter().enumerate().map(|(i, t)| (t.clone(), ObjId(i))).collect();
    let morphism_index: HashMap<Vec<MorId>, MorId> =
        morphism_tuples.iter().enumerate().map(|(i, t)| (t.clone(), MorId(i))).collect();

    let objects = object_tuples
        .iter()
        .map(|t| tuple_name(t.iter().zip(cs).map(|(&x, c)| c.object_name(x))))
        .collect();
    let morphisms: Vec<_> = morphism_tuples
        .iter()
        .map(|t| {
            let name = tuple_name(t.iter().zip(cs).map(|(&f, c)| c.morphism_name(f)));
            let dom: Vec<ObjId> = t.iter().zip(cs).map(|(&f, c)| c.dom(f)).collect();
            let cod: Vec<ObjId> = t.iter().zip(cs).map(|(&f, c)| c.cod(f)).collect();
            (name, object_index[&dom].0, object_index[&cod].0)
        })
        .collect();
    let identity: Vec<usize> = object_tuples
        .iter()
        .map(|t| morphism_index[&t.iter().zip(cs).map(|(&x, c)| c.id(x)).collect::<Vec<_>>()].0)
        .collect();
    let category = Arc::new(assemble(objects, &morphisms, &identity, |g, f| {
        let gf: Vec<MorId> = (0..cs.len())
            .map(|i| cs[i].compose(morphism_tuples[g][i], morphism_tuples[f][i]))
            .collect();
        morphism_index[&gf].0
    })?);
    let projections = (0..cs.len())
        .map(|i| {
            FunctorMap::new(
                category.clone(),
                cs[i].clone(),
                object_tuples.iter().map(|t| t[i]).collect(),
                morphism_tuples.iter().map(|t| t[i]).collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProductCategory {
        category,
        factors: cs.to_vec(),
        projections,
        object_tuples,
        morphism_tuples,
        object_index,
        morphism_index,
    })
}

/// The comma category of `X → ρ(Y)` triples with its two projections and
/// the section `Y ↦ (ρY, Y, id)`.
#[derive(Clone, Debug)]
pub struct CommaCategory {
    pub category: Arc<FiniteCategory>,
    pub rho: FunctorMap,
    /// Projection to the source `B` of `ρ`.
    pub p: FunctorMap,
    /// Projection to the target `C` of `ρ`.
    pub q: FunctorMap,
    pub s: FunctorMap,
    objects: Vec<(ObjId, ObjId, MorId)>,
    morphisms: Vec<(MorId, MorId)>,
}

impl CommaCategory {
    /// `(X, Y, f : X → ρY)` for a comma object.
    pub fn triple(&self, z: ObjId) -> (ObjId, ObjId, MorId) {
        self.objects[z.0]
    }

    /// `(a : X → X′, b : Y → Y′)` for a comma morphism.
    pub fn pair(&self, m: MorId) -> (MorId, MorId) {
        self.morphisms[m.0]
    }
}

pub fn comma_category(rho: &FunctorMap) -> Result<CommaCategory> {
    let report = rho.violations();
    if !report.is_empty() {
        return Err(Error::InvalidFunctor(report));
    }
    let (b, c) = (rho.source().clone(), rho.target().clone());
    let mut objects = Vec::new();
    for y in b.object_ids() {
        for &f in c.hom_into(rho.obj(y)) {
            objects.push((c.dom(f), y, f));
        }
    }
    objects.sort();
    let object_index: HashMap<(ObjId, ObjId, MorId), usize> =
        objects.iter().enumerate().map(|(i, t)| (*t, i)).collect();

    let name_of = |&(x, y, f): &(ObjId, ObjId, MorId)| {
        format!("({},{},{})", c.object_name(x), b.object_name(y), c.morphism_name(f))
    };
    let mut morphisms = Vec::new();
    let mut decls = Vec::new();
    for (si, &(x, y, f)) in objects.iter().enumerate() {
        for (ti, &(x2, y2, f2)) in objects.iter().enumerate() {
            for a in c.hom(x, x2) {
                for bm in b.hom(y, y2) {
                    if c.compose(f2, a) == c.compose(rho.mor(bm), f) {
                        morphisms.push((a, bm));
                        decls.push((
                            format!(
                                "({},{}):{}->{}",
                                c.morphism_name(a),
                                b.morphism_name(bm),
                                name_of(&objects[si]),
                                name_of(&objects[ti])
                            ),
                            si,
                            ti,
                        ));
                    }
                }
            }
        }
    }
    let morphism_index: HashMap<(MorId, MorId, usize, usize), usize> = morphisms
        .iter()
        .zip(&decls)
        .enumerate()
        .map(|(i, (&(a, bm), (_, s, t)))| ((a, bm, *s, *t), i))
        .collect();
    let identity: Vec<usize> = objects
        .iter()
        .enumerate()
        .map(|(i, &(x, y, _))| morphism_index[&(c.id(x), b.id(y), i, i)])
        .collect();
    let category = Arc::new(assemble(objects.iter().map(name_of).collect(), &decls, &identity, |g, f| {
        let (ga, gb) = morphisms[g];
        let (fa, fb) = morphisms[f];
        morphism_index[&(c.compose(ga, fa), b.compose(gb, fb), decls[f].1, decls[g].2)]
    })?);

    let p = FunctorMap::new(
        category.clone(),
        b.clone(),
        objects.iter().map(|t| t.1).collect(),
        morphisms.iter().map(|m| m.1).collect(),
    )?;
    let q = FunctorMap::new(
        category.clone(),
        c.clone(),
        objects.iter().map(|t| t.0).collect(),
        morphisms.iter().map(|m| m.0).collect(),
    )?;
    let section_obj: Vec<ObjId> = b
        .object_ids()
        .map(|y| ObjId(object_index[&(rho.obj(y), y, c.id(rho.obj(y)))]))
        .collect();
    let s = FunctorMap::new(
        b.clone(),
        category.clone(),
        section_obj.clone(),
        b.morphism_ids()
            .map(|m| MorId(morphism_index[&(rho.mor(m), m, section_obj[b.dom(m).0].0, section_obj[b.cod(m).0].0)]))
            .collect(),
    )?;
    Ok(CommaCategory { category, rho: rho.clone(), p, q, s, objects, morphisms })
}

pub fn idempotents(c: &FiniteCategory) -> Vec<MorId> {
    c.morphism_ids().filter(|&e| c.dom(e) == c.cod(e) && c.compose(e, e) == e).collect()
}

/// Karoubi envelope and the embedding `X ↦ (X, id)`.
pub fn karoubi_completion(c: &Arc<FiniteCategory>) -> Result<(Arc<FiniteCategory>, FunctorMap)> {
    let objects: Vec<(ObjId, MorId)> = idempotents(c).into_iter().map(|e| (c.dom(e), e)).collect();
    let label = |&(x, e): &(ObjId, MorId)| format!("({},{})", c.object_name(x), c.morphism_name(e));
    let mut morphisms = Vec::new();
    let mut decls = Vec::new();
    for (si, &(x, e)) in objects.iter().enumerate() {
        for (ti, &(x2, e2)) in objects.iter().enumerate() {
            for u in c.hom(x, x2) {
                if c.compose(e2, u) == u && c.compose(u, e) == u {
                    morphisms.push(u);
                    decls.push((
                        format!("{}:{}->{}", c.morphism_name(u), label(&objects[si]), label(&objects[ti])),
                        si,
                        ti,
                    ));
                }
            }
        }
    }
    let index: HashMap<(MorId, usize, usize), usize> =
        morphisms.iter().zip(&decls).enumerate().map(|(i, (&u, (_, s, t)))| ((u, *s, *t), i)).collect();
    let identity: Vec<usize> = objects.iter().enumerate().map(|(i, &(_, e))| index[&(e, i, i)]).collect();
    let category = Arc::new(assemble(objects.iter().map(label).collect(), &decls, &identity, |g, f| {
        index[&(c.compose(morphisms[g], morphisms[f]), decls[f].1, decls[g].2)]
    })?);
    let embed_obj: Vec<ObjId> = c
        .object_ids()
        .map(|x| ObjId(objects.iter().position(|&(y, e)| y == x && e == c.id(x)).expect("identity is idempotent")))
        .collect();
    let embedding = FunctorMap::new(
        c.clone(),
        category.clone(),
        embed_obj.clone(),
        c.morphism_ids().map(|u| MorId(index[&(u, embed_obj[c.dom(u).0].0, embed_obj[c.cod(u).0].0)])).collect(),
    )?;
    Ok((category, embedding))
}

/// Whether every idempotent `e` factors as `i ∘ r` with `r ∘ i = id`.
pub fn idempotents_split(c: &FiniteCategory) -> bool {
    idempotents(c).into_iter().all(|e| {
        let x = c.dom(e);
        c.object_ids().any(|y| {
            c.hom(y, x).any(|i| c.hom(x, y).any(|r| c.compose(i, r) == e && c.compose(r, i) == c.id(y)))
        })
    })
}

/// Object and morphism counts of a skeleton: one representative per
/// isomorphism class of objects.
pub fn skeleton_counts(c: &FiniteCategory) -> (usize, usize) {
    let mut reps: Vec<ObjId> = Vec::new();
    for x in c.object_ids() {
        if !reps.iter().any(|&r| c.hom(x, r).any(|f| c.is_iso(f))) {
            reps.push(x);
        }
    }
    let morphisms = reps.iter().flat_map(|&x| reps.iter().map(move |&y| (x, y))).map(|(x, y)| c.hom(x, y).count()).sum();
    (reps.len(), morphisms)
}

/// Exhaustive search for an isomorphism of categories `c → d`.
pub fn find_isomorphism(c: &Arc<FiniteCategory>, d: &Arc<FiniteCategory>) -> Option<FunctorMap> {
    if c.object_count() != d.object_count() || c.morphism_count() != d.morphism_count() {
        return None;
    }
    let n = c.object_count();
    let mut objs = vec![ObjId(0); n];
    let mut used = vec![false; n];
    search_objects(c, d, 0, &mut objs, &mut used)
}

fn search_objects(
    c: &Arc<FiniteCategory>,
    d: &Arc<FiniteCategory>,
    i: usize,
    objs: &mut Vec<ObjId>,
    used: &mut Vec<bool>,
) -> Option<FunctorMap> {
    if i == objs.len() {
        let mut mors = vec![None; c.morphism_count()];
        let mut used_m = vec![false; d.morphism_count()];
        return search_morphisms(c, d, objs, 0, &mut mors, &mut used_m);
    }
    for j in 0..objs.len() {
        let (x, y) = (ObjId(i), ObjId(j));
        if used[j] || c.hom_into(x).len() != d.hom_into(y).len() || c.hom_from(x).len() != d.hom_from(y).len() {
            continue;
        }
        used[j] = true;
        objs[i] = y;
        if let Some(f) = search_objects(c, d, i + 1, objs, used) {
            return Some(f);
        }
        used[j] = false;
    }
    None
}

fn search_morphisms(
    c: &Arc<FiniteCategory>,
    d: &Arc<FiniteCategory>,
    objs: &[ObjId],
    i: usize,
    mors: &mut Vec<Option<MorId>>,
    used: &mut Vec<bool>,
) -> Option<FunctorMap> {
    if i == mors.len() {
        let f = FunctorMap::new(c.clone(), d.clone(), objs.to_vec(), mors.iter().map(|m| m.unwrap()).collect());
        return f.ok();
    }
    let m = MorId(i);
    let candidates: Vec<MorId> = if c.is_identity(m) {
        vec![d.id(objs[c.dom(m).0])]
    } else {
        d.hom(objs[c.dom(m).0], objs[c.cod(m).0]).filter(|g| !d.is_identity(*g)).collect()
    };
    for g in candidates {
        if used[g.0] {
            continue;
        }
        mors[i] = Some(g);
        used[g.0] = true;
        // prune on composites whose factors are already assigned
        let consistent = (0..=i).all(|a| {
            let a = MorId(a);
            c.try_compose(m, a).map_or(true, |ma| match mors[ma.0] {
                Some(img) => d.try_compose(g, mors[a.0].unwrap()) == Some(img),
                None => true,
            }) && c.try_compose(a, m).map_or(true, |am| match mors[am.0] {
                Some(img) => d.try_compose(mors[a.0].unwrap(), g) == Some(img),
                None => true,
            })
        });
        if consistent {
            if let Some(f) = search_morphisms(c, d, objs, i + 1, mors, used) {
                return Some(f);
            }
        }
        mors[i] = None;
        used[g.0] = false;
    }
    None
}
