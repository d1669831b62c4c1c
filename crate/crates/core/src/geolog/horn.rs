//! Horn objects and geometric normal forms.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::signature::{FunId, RelId, Signature, SortId};
use super::syntax::{check_sorts, infer_context, Formula, SequentAst, Term};
use crate::error::{Error, Result};

/// A relation symbol applied to variable indices, one per argument, each
/// counted within the sort the relation expects there.
pub type Instance = (RelId, Vec<usize>);

/// A finite context (a multiplicity per sort) and a set of relation
/// instances over it. Variables are `(sort, index)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HornObject {
    mult: Vec<usize>,
    instances: BTreeSet<Instance>,
}

impl HornObject {
    pub fn new(sig: &Signature, mult: Vec<usize>, instances: impl IntoIterator<Item = Instance>) -> Result<Self> {
        if mult.len() != sig.sort_count() {
            return Err(Error::Signature(format!("context lists {} sorts, signature has {}", mult.len(), sig.sort_count())));
        }
        let instances: BTreeSet<Instance> = instances.into_iter().collect();
        for (r, args) in &instances {
            let Some(decl) = sig.relations().get(*r) else {
                return Err(Error::Signature(format!("relation index {r} is not declared")));
            };
            if decl.arity.len() != args.len() || args.iter().zip(&decl.arity).any(|(&i, &s)| i >= mult[s]) {
                return Err(Error::IllSorted(format!("instance of `{}` does not fit the context", decl.name)));
            }
        }
        Ok(HornObject { mult, instances })
    }

    /// The object with no variables and no instances.
    pub fn empty(sig: &Signature) -> Self {
        HornObject { mult: vec![0; sig.sort_count()], instances: BTreeSet::new() }
    }

    /// A bare context.
    pub fn context(mult: Vec<usize>) -> Self {
        HornObject { mult, instances: BTreeSet::new() }
    }

    pub(crate) fn from_parts(mult: Vec<usize>, instances: BTreeSet<Instance>) -> Self {
        HornObject { mult, instances }
    }

    pub fn mult(&self, s: SortId) -> usize {
        self.mult[s]
    }

    pub fn mults(&self) -> &[usize] {
        &self.mult
    }

    pub fn instances(&self) -> &BTreeSet<Instance> {
        &self.instances
    }

    pub fn var_count(&self) -> usize {
        self.mult.iter().sum()
    }

    /// `{A1,A2 | R(A1,A2)}` with 1-based indices.
    pub fn describe(&self, sig: &Signature) -> String {
        let vars: Vec<String> = (0..self.mult.len())
            .flat_map(|s| (1..=self.mult[s]).map(move |i| format!("{}{i}", sig.sort_name(s))))
            .collect();
        let insts: Vec<String> = self
            .instances
            .iter()
            .map(|(r, args)| {
                let decl = &sig.relations()[*r];
                let a: Vec<String> = args.iter().zip(&decl.arity).map(|(i, &s)| format!("{}{}", sig.sort_name(s), i + 1)).collect();
                format!("{}({})", decl.name, a.join(","))
            })
            .collect();
        format!("{{{} | {}}}", vars.join(","), insts.join(", "))
    }
}

/// `∃(extra variables). H`, with each context variable sent to a variable
/// of `H` of the same sort. Extra variables are those of `H` outside the
/// image of the context.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Disjunct {
    pub object: HornObject,
    pub context_map: Vec<usize>,
}

/// A finite disjunction of existentially quantified Horn objects over a
/// shared context.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeometricFormulaNF {
    pub context: Vec<(String, SortId)>,
    pub disjuncts: Vec<Disjunct>,
}

impl GeometricFormulaNF {
    /// Multiplicities of the bare context.
    pub fn context_mult(&self, sig: &Signature) -> Vec<usize> {
        let mut mult = vec![0; sig.sort_count()];
        for (_, s) in &self.context {
            mult[*s] += 1;
        }
        mult
    }

    /// Index of each context variable within its sort in the bare context.
    pub fn context_positions(&self) -> Vec<usize> {
        let mut seen: HashMap<SortId, usize> = HashMap::new();
        self.context
            .iter()
            .map(|(_, s)| {
                let k = seen.entry(*s).or_insert(0);
                *k += 1;
                *k - 1
            })
            .collect()
    }

    pub fn describe(&self, sig: &Signature) -> String {
        if self.disjuncts.is_empty() {
            return "⊥".into();
        }
        let mut out = String::new();
        for (i, d) in self.disjuncts.iter().enumerate() {
            if i > 0 {
                out.push_str(" ∨ ");
            }
            let ctx: Vec<String> = self
                .context
                .iter()
                .zip(&d.context_map)
                .map(|((v, s), i)| format!("{v}↦{}{}", sig.sort_name(*s), i + 1))
                .collect();
            let _ = write!(out, "[{}] {}", ctx.join(","), d.object.describe(sig));
        }
        out
    }
}

#[derive(Clone, Debug, Default)]
struct Raw {
    ext: Vec<(String, SortId)>,
    atoms: Vec<(RelId, Vec<String>)>,
    eqs: Vec<(String, String)>,
}

fn raws(sig: &Signature, f: &Formula, env: &HashMap<String, (String, SortId)>, fresh: &mut usize) -> Result<Vec<Raw>> {
    let var = |t: &Term| -> Result<(String, SortId)> {
        match t {
            Term::Var(v) => env.get(v).cloned().ok_or_else(|| Error::IllSorted(format!("variable `{v}` is not in context"))),
            Term::App(g, _) => Err(Error::Signature(format!("function symbol `{g}` in a relational formula"))),
        }
    };
    Ok(match f {
        Formula::Top => vec![Raw::default()],
        Formula::Bottom => Vec::new(),
        Formula::Atom(r, args) => {
            let id = sig.relation(r).ok_or_else(|| Error::Signature(format!("unknown relation symbol `{r}`")))?;
            let arity = &sig.relations()[id].arity;
            if arity.len() != args.len() {
                return Err(Error::IllSorted(format!("`{r}` takes {} arguments, got {}", arity.len(), args.len())));
            }
            let mut names = Vec::new();
            for (t, &want) in args.iter().zip(arity) {
                let (name, got) = var(t)?;
                if got != want {
                    return Err(Error::IllSorted(format!("argument `{t}` of `{r}` has the wrong sort")));
                }
                names.push(name);
            }
            vec![Raw { atoms: vec![(id, names)], ..Raw::default() }]
        }
        Formula::Eq(a, b) => {
            let ((na, sa), (nb, sb)) = (var(a)?, var(b)?);
            if sa != sb {
                return Err(Error::IllSorted(format!("`{a} = {b}` compares different sorts")));
            }
            vec![Raw { eqs: vec![(na, nb)], ..Raw::default() }]
        }
        Formula::And(fs) => {
            let mut acc = vec![Raw::default()];
            for g in fs {
                let parts = raws(sig, g, env, fresh)?;
                acc = acc
                    .iter()
                    .flat_map(|a| {
                        parts.iter().map(move |b| Raw {
                            ext: [a.ext.clone(), b.ext.clone()].concat(),
                            atoms: [a.atoms.clone(), b.atoms.clone()].concat(),
                            eqs: [a.eqs.clone(), b.eqs.clone()].concat(),
                        })
                    })
                    .collect();
            }
            acc
        }
        Formula::Or(fs) => {
            let mut acc = Vec::new();
            for g in fs {
                acc.extend(raws(sig, g, env, fresh)?);
            }
            acc
        }
        Formula::Exists(vs, body) => {
            let mut inner = env.clone();
            let mut bound = Vec::new();
            for (v, s) in vs {
                *fresh += 1;
                let unique = format!("{v}#{fresh}");
                let sort = sig.sort(s)?;
                inner.insert(v.clone(), (unique.clone(), sort));
                bound.push((unique, sort));
            }
            let mut out = raws(sig, body, &inner, fresh)?;
            for r in &mut out {
                r.ext.splice(0..0, bound.iter().cloned());
            }
            out
        }
    })
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut root = i;
    while parent[root] != root {
        root = parent[root];
    }
    let mut k = i;
    while parent[k] != root {
        let next = parent[k];
        parent[k] = root;
        k = next;
    }
    root
}

/// Union-find over variables `0..n`, merging later roots into earlier ones.
pub(crate) fn merge_classes(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    for (a, b) in pairs {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        parent[hi] = lo;
    }
    (0..n).map(|i| find(&mut parent, i)).collect()
}

fn finish(sig: &Signature, context: &[(String, SortId)], raw: Raw) -> Disjunct {
    let vars: Vec<(String, SortId)> = context.iter().cloned().chain(raw.ext).collect();
    let pos: HashMap<&str, usize> = vars.iter().enumerate().map(|(i, (v, _))| (v.as_str(), i)).collect();
    let roots = merge_classes(vars.len(), raw.eqs.iter().map(|(a, b)| (pos[a.as_str()], pos[b.as_str()])));
    let mut mult = vec![0; sig.sort_count()];
    let mut index = vec![usize::MAX; vars.len()];
    for i in 0..vars.len() {
        if roots[i] == i {
            let s = vars[i].1;
            index[i] = mult[s];
            mult[s] += 1;
        }
    }
    let at = |i: usize| index[roots[i]];
    let instances = raw.atoms.iter().map(|(r, args)| (*r, args.iter().map(|a| at(pos[a.as_str()])).collect())).collect();
    Disjunct { object: HornObject { mult, instances }, context_map: (0..context.len()).map(at).collect() }
}

/// Distributes `∧` over `∨`, pulls `∃` outwards and eliminates equations
/// between variables by identifying them.
pub fn normalize_geometric(sig: &Signature, context: &[(String, SortId)], f: &Formula) -> Result<GeometricFormulaNF> {
    let env: HashMap<String, (String, SortId)> = context.iter().map(|(v, s)| (v.clone(), (v.clone(), *s))).collect();
    if env.len() != context.len() {
        return Err(Error::IllSorted("context repeats a variable".into()));
    }
    let mut fresh = 0;
    let mut disjuncts = Vec::new();
    for raw in raws(sig, f, &env, &mut fresh)? {
        let d = finish(sig, context, raw);
        if !disjuncts.contains(&d) {
            disjuncts.push(d);
        }
    }
    Ok(GeometricFormulaNF { context: context.to_vec(), disjuncts })
}

/// `lhs ⊢ rhs` in normal form over a shared context.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sequent {
    pub context: Vec<(String, SortId)>,
    pub lhs: GeometricFormulaNF,
    pub rhs: GeometricFormulaNF,
}

fn resolve_context(sig: &Signature, ast: &SequentAst) -> Result<Vec<(String, SortId)>> {
    let context = match &ast.context {
        Some(vars) => vars.iter().map(|(v, s)| Ok((v.clone(), sig.sort(s)?))).collect::<Result<Vec<_>>>()?,
        None => infer_context(sig, &[&ast.lhs, &ast.rhs])?,
    };
    let env: HashMap<String, SortId> = context.iter().cloned().collect();
    check_sorts(sig, &env, &ast.lhs)?;
    check_sorts(sig, &env, &ast.rhs)?;
    Ok(context)
}

impl Sequent {
    /// Normalizes a sequent over a relational signature.
    pub fn from_ast(sig: &Signature, ast: &SequentAst) -> Result<Sequent> {
        let context = resolve_context(sig, ast)?;
        Ok(Sequent {
            lhs: normalize_geometric(sig, &context, &ast.lhs)?,
            rhs: normalize_geometric(sig, &context, &ast.rhs)?,
            context,
        })
    }

    pub fn parse(sig: &Signature, text: &str) -> Result<Sequent> {
        Self::from_ast(sig, &super::syntax::parse_sequent(text)?)
    }

    pub fn describe(&self, sig: &Signature) -> String {
        format!("{} ⊢ {}", self.lhs.describe(sig), self.rhs.describe(sig))
    }
}

/// A functional signature turned relational: one graph relation per
/// function symbol, with its functionality and totality axioms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relationalized {
    pub source: Signature,
    pub signature: Signature,
    /// Graph relation of each function symbol.
    pub graphs: Vec<RelId>,
    pub axioms: Vec<Sequent>,
}

/// Name of the graph relation minted for `f`.
pub fn graph_name(f: &str) -> String {
    format!("R_{f}")
}

pub fn relationalize(sig: &Signature) -> Result<Relationalized> {
    let mut rel = sig.relational_part();
    let mut graphs = Vec::new();
    let mut axioms = Vec::new();
    for decl in sig.functions() {
        let name = graph_name(&decl.name);
        if sig.relation(&name).is_some() || sig.function(&name).is_some() || rel.relation(&name).is_some() {
            return Err(Error::Signature(format!("minted relation name `{name}` is already taken")));
        }
        let arity: Vec<&str> = decl.args.iter().chain([&decl.result]).map(|&s| sig.sort_name(s)).collect();
        let id = rel.add_relation(&name, &arity)?;
        graphs.push(id);

        let xs: Vec<(String, SortId)> = decl.args.iter().enumerate().map(|(i, &s)| (format!("x{}", i + 1), s)).collect();
        let result = decl.result;
        let atom = |out: &str| {
            let mut args: Vec<Term> = xs.iter().map(|(v, _)| Term::var(v)).collect();
            args.push(Term::var(out));
            Formula::Atom(name.clone(), args)
        };
        let mut ctx = xs.clone();
        ctx.push(("y".into(), result));
        ctx.push(("y'".into(), result));
        let functional = Formula::And(vec![atom("y"), atom("y'")]);
        let equal = Formula::Eq(Term::var("y"), Term::var("y'"));
        axioms.push(Sequent {
            lhs: normalize_geometric(&rel, &ctx, &functional)?,
            rhs: normalize_geometric(&rel, &ctx, &equal)?,
            context: ctx,
        });
        let total = Formula::Exists(vec![("y".into(), sig.sort_name(result).into())], Box::new(atom("y")));
        axioms.push(Sequent {
            lhs: normalize_geometric(&rel, &xs, &Formula::Top)?,
            rhs: normalize_geometric(&rel, &xs, &total)?,
            context: xs,
        });
    }
    Ok(Relationalized { source: sig.clone(), signature: rel, graphs, axioms })
}

impl Relationalized {
    pub fn graph_of(&self, f: FunId) -> RelId {
        self.graphs[f]
    }

    /// Replaces every composite term by a fresh variable constrained by the
    /// graph relation of its head symbol.
    pub fn flatten(&self, f: &Formula) -> Result<Formula> {
        let mut fresh = 0;
        self.flatten_with(f, &mut fresh)
    }

    fn flat_term(&self, t: &Term, ext: &mut Vec<(String, String)>, atoms: &mut Vec<Formula>, fresh: &mut usize) -> Result<Term> {
        match t {
            Term::Var(_) => Ok(t.clone()),
            Term::App(g, args) => {
                let id = self.source.function(g).ok_or_else(|| Error::Signature(format!("unknown function symbol `{g}`")))?;
                let mut flat: Vec<Term> = args.iter().map(|a| self.flat_term(a, ext, atoms, fresh)).collect::<Result<_>>()?;
                *fresh += 1;
                let z = format!("#t{fresh}");
                ext.push((z.clone(), self.source.sort_name(self.source.functions()[id].result).into()));
                flat.push(Term::Var(z.clone()));
                atoms.push(Formula::Atom(graph_name(g), flat));
                Ok(Term::Var(z))
            }
        }
    }

    fn flatten_with(&self, f: &Formula, fresh: &mut usize) -> Result<Formula> {
        let wrap = |ext: Vec<(String, String)>, mut atoms: Vec<Formula>, last: Formula| {
            if ext.is_empty() {
                last
            } else {
                atoms.push(last);
                Formula::Exists(ext, Box::new(Formula::And(atoms)))
            }
        };
        Ok(match f {
            Formula::Top | Formula::Bottom => f.clone(),
            Formula::Atom(r, args) => {
                let (mut ext, mut atoms) = (Vec::new(), Vec::new());
                let flat = args.iter().map(|a| self.flat_term(a, &mut ext, &mut atoms, fresh)).collect::<Result<_>>()?;
                wrap(ext, atoms, Formula::Atom(r.clone(), flat))
            }
            Formula::Eq(a, b) => {
                let (mut ext, mut atoms) = (Vec::new(), Vec::new());
                let fa = self.flat_term(a, &mut ext, &mut atoms, fresh)?;
                let fb = self.flat_term(b, &mut ext, &mut atoms, fresh)?;
                wrap(ext, atoms, Formula::Eq(fa, fb))
            }
            Formula::And(fs) => Formula::And(fs.iter().map(|g| self.flatten_with(g, fresh)).collect::<Result<_>>()?),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|g| self.flatten_with(g, fresh)).collect::<Result<_>>()?),
            Formula::Exists(vs, body) => Formula::Exists(vs.clone(), Box::new(self.flatten_with(body, fresh)?)),
        })
    }

    /// Checks sorts against the functional signature, flattens terms and
    /// normalizes over the relational one.
    pub fn translate_formula(&self, context: &[(String, SortId)], f: &Formula) -> Result<GeometricFormulaNF> {
        let env: HashMap<String, SortId> = context.iter().cloned().collect();
        check_sorts(&self.source, &env, f)?;
        normalize_geometric(&self.signature, context, &self.flatten(f)?)
    }

    pub fn translate_sequent(&self, ast: &SequentAst) -> Result<Sequent> {
        let context = resolve_context(&self.source, ast)?;
        Ok(Sequent {
            lhs: self.translate_formula(&context, &ast.lhs)?,
            rhs: self.translate_formula(&context, &ast.rhs)?,
            context,
        })
    }
}
