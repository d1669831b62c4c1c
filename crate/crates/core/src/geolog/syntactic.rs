//! The cartesian syntactic category of a relational signature without
//! axioms. A morphism `a → b` gives, for every sort, a map from the
//! variables of `b` to those of `a` under which every instance of `b`
//! becomes an instance of `a`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::horn::{merge_classes, HornObject, Instance};
use super::signature::Signature;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SyntacticMorphism {
    pub from: HornObject,
    pub to: HornObject,
    /// `maps[s][i]` is the variable of `from` substituted for variable `i`
    /// of sort `s` in `to`.
    maps: Vec<Vec<usize>>,
}

fn transport(sig: &Signature, maps: &[Vec<usize>], (r, args): &Instance) -> Instance {
    let arity = &sig.relations()[*r].arity;
    (*r, args.iter().zip(arity).map(|(&i, &s)| maps[s][i]).collect())
}

impl SyntacticMorphism {
    pub fn new(sig: &Signature, from: HornObject, to: HornObject, maps: Vec<Vec<usize>>) -> Result<Self> {
        let sorts = sig.sort_count();
        if from.mults().len() != sorts || to.mults().len() != sorts || maps.len() != sorts {
            return Err(Error::Signature("objects and maps must cover every sort of the signature".into()));
        }
        for s in 0..sorts {
            if maps[s].len() != to.mult(s) || maps[s].iter().any(|&i| i >= from.mult(s)) {
                return Err(Error::NotAMorphism(format!("map on sort {} does not fit the contexts", sig.sort_name(s))));
            }
        }
        for inst in to.instances() {
            if !from.instances().contains(&transport(sig, &maps, inst)) {
                return Err(Error::NotAMorphism(format!(
                    "instance of `{}` is not carried into the source",
                    sig.relations()[inst.0].name
                )));
            }
        }
        Ok(SyntacticMorphism { from, to, maps })
    }

    pub fn identity(h: &HornObject) -> Self {
        let maps = h.mults().iter().map(|&m| (0..m).collect()).collect();
        SyntacticMorphism { from: h.clone(), to: h.clone(), maps }
    }

    pub fn maps(&self) -> &[Vec<usize>] {
        &self.maps
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &SyntacticMorphism) -> Result<SyntacticMorphism> {
        if first.to != self.from {
            return Err(Error::NotAMorphism("composite of non-composable morphisms".into()));
        }
        let maps = self.maps.iter().enumerate().map(|(s, m)| m.iter().map(|&i| first.maps[s][i]).collect()).collect();
        Ok(SyntacticMorphism { from: first.from.clone(), to: self.to.clone(), maps })
    }

    /// An inverse, if the maps are bijective and instances match exactly.
    pub fn is_iso(&self, sig: &Signature) -> bool {
        self.from.mults() == self.to.mults()
            && self.maps.iter().all(|m| m.iter().collect::<BTreeSet<_>>().len() == m.len())
            && self.to.instances().iter().map(|i| transport(sig, &self.maps, i)).collect::<BTreeSet<_>>() == *self.from.instances()
    }
}

/// Morphisms `a → b` whose maps agree with `fixed` where it has a value.
fn homs_with(sig: &Signature, a: &HornObject, b: &HornObject, fixed: &[Vec<Option<usize>>], limit: usize) -> Vec<SyntacticMorphism> {
    let sorts = sig.sort_count();
    let vars: Vec<(usize, usize)> = (0..sorts).flat_map(|s| (0..b.mult(s)).map(move |i| (s, i))).collect();
    let mut order_of = vec![Vec::new(); sorts];
    for (k, &(s, _)) in vars.iter().enumerate() {
        order_of[s].push(k);
    }
    // Instances of b checked once their last variable is assigned.
    let mut checks: Vec<Vec<&Instance>> = vec![Vec::new(); vars.len() + 1];
    for inst in b.instances() {
        let arity = &sig.relations()[inst.0].arity;
        let last = inst.1.iter().zip(arity).map(|(&i, &s)| order_of[s][i] + 1).max().unwrap_or(0);
        checks[last].push(inst);
    }
    let mut maps: Vec<Vec<usize>> = (0..sorts).map(|s| vec![0; b.mult(s)]).collect();
    let mut out = Vec::new();
    fn go(
        sig: &Signature,
        a: &HornObject,
        vars: &[(usize, usize)],
        fixed: &[Vec<Option<usize>>],
        checks: &[Vec<&Instance>],
        k: usize,
        maps: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<Vec<usize>>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if !checks[k].iter().all(|inst| a.instances().contains(&transport(sig, maps, inst))) {
            return;
        }
        let Some(&(s, i)) = vars.get(k) else {
            out.push(maps.clone());
            return;
        };
        let choices: Vec<usize> = match fixed[s][i] {
            Some(v) => vec![v],
            None => (0..a.mult(s)).collect(),
        };
        for v in choices {
            maps[s][i] = v;
            go(sig, a, vars, fixed, checks, k + 1, maps, out, limit);
        }
    }
    let mut raw = Vec::new();
    go(sig, a, &vars, fixed, &checks, 0, &mut maps, &mut raw, limit);
    out.extend(raw.into_iter().map(|maps| SyntacticMorphism { from: a.clone(), to: b.clone(), maps }));
    out
}

fn unconstrained(b: &HornObject) -> Vec<Vec<Option<usize>>> {
    b.mults().iter().map(|&m| vec![None; m]).collect()
}

/// Every morphism `a → b`, in lexicographic order of the maps.
pub fn syntactic_homs(sig: &Signature, a: &HornObject, b: &HornObject) -> Vec<SyntacticMorphism> {
    homs_with(sig, a, b, &unconstrained(b), usize::MAX)
}

/// Some `k : source → m.from` with `m ∘ k = b`, if one exists.
pub fn factor_through(sig: &Signature, m: &SyntacticMorphism, b: &SyntacticMorphism) -> Option<SyntacticMorphism> {
    if m.to != b.to {
        return None;
    }
    let mut fixed = unconstrained(&m.from);
    for (s, ms) in m.maps.iter().enumerate() {
        for (i, &j) in ms.iter().enumerate() {
            match fixed[s][j] {
                Some(v) if v != b.maps[s][i] => return None,
                _ => fixed[s][j] = Some(b.maps[s][i]),
            }
        }
    }
    homs_with(sig, &b.from, &m.from, &fixed, 1).pop()
}

/// Whether `m` has a section, so that it alone covers its target.
pub fn is_split_epi(sig: &Signature, m: &SyntacticMorphism) -> bool {
    factor_through(sig, m, &SyntacticMorphism::identity(&m.to)).is_some()
}

/// Union of instances over the merged context, variables with equal
/// `(sort, index)` identified.
pub fn horn_conjunction(sig: &Signature, h1: &HornObject, h2: &HornObject) -> Result<HornObject> {
    if h1.mults().len() != sig.sort_count() || h2.mults().len() != sig.sort_count() {
        return Err(Error::IllSorted("conjunction of objects over different signatures".into()));
    }
    let mult = h1.mults().iter().zip(h2.mults()).map(|(&a, &b)| a.max(b)).collect();
    let instances = h1.instances().iter().chain(h2.instances()).cloned().collect();
    Ok(HornObject::from_parts(mult, instances))
}

/// A pullback square over a cospan `a → c ← b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pullback {
    pub object: HornObject,
    pub to_first: SyntacticMorphism,
    pub to_second: SyntacticMorphism,
}

/// Variables of `a` and `b` side by side, identified along the two maps
/// from `c`; the instances of both carried over.
pub fn horn_pullback(sig: &Signature, f: &SyntacticMorphism, g: &SyntacticMorphism) -> Result<Pullback> {
    if f.to != g.to {
        return Err(Error::IllSorted("pullback of morphisms with different targets".into()));
    }
    let (a, b, c) = (&f.from, &g.from, &f.to);
    let sorts = sig.sort_count();
    let mut mult = vec![0; sorts];
    let mut pa = Vec::with_capacity(sorts);
    let mut pb = Vec::with_capacity(sorts);
    for s in 0..sorts {
        let (na, nb) = (a.mult(s), b.mult(s));
        let roots = merge_classes(na + nb, (0..c.mult(s)).map(|i| (f.maps[s][i], na + g.maps[s][i])));
        let mut index = vec![usize::MAX; na + nb];
        for v in 0..na + nb {
            if roots[v] == v {
                index[v] = mult[s];
                mult[s] += 1;
            }
        }
        pa.push((0..na).map(|v| index[roots[v]]).collect::<Vec<_>>());
        pb.push((na..na + nb).map(|v| index[roots[v]]).collect::<Vec<_>>());
    }
    let instances: BTreeSet<Instance> = a
        .instances()
        .iter()
        .map(|i| transport(sig, &pa, i))
        .chain(b.instances().iter().map(|i| transport(sig, &pb, i)))
        .collect();
    let object = HornObject::from_parts(mult, instances);
    Ok(Pullback {
        to_first: SyntacticMorphism { from: object.clone(), to: a.clone(), maps: pa },
        to_second: SyntacticMorphism { from: object.clone(), to: b.clone(), maps: pb },
        object,
    })
}
