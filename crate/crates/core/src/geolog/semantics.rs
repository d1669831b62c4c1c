//! Finite models and evaluation.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::horn::{Disjunct, GeometricFormulaNF, Relationalized, Sequent};
use super::signature::{Signature, SortId};
use super::syntax::{Formula, Term};
use crate::error::{Error, Result};

/// Carriers `0..n` per sort, relations as truth tables and functions as
/// value tables, both indexed in mixed radix over the argument carriers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteModel {
    carriers: Vec<usize>,
    relations: Vec<Vec<bool>>,
    functions: Vec<Vec<usize>>,
}

/// Model file and report format.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDoc {
    pub carriers: BTreeMap<String, usize>,
    pub relations: BTreeMap<String, Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub functions: BTreeMap<String, Vec<(Vec<usize>, usize)>>,
}

fn table_size(carriers: &[usize], sorts: &[SortId]) -> usize {
    sorts.iter().map(|&s| carriers[s]).product()
}

fn index_of(carriers: &[usize], sorts: &[SortId], args: &[usize]) -> usize {
    sorts.iter().zip(args).fold(0, |acc, (&s, &a)| acc * carriers[s] + a)
}

fn tuple_of(carriers: &[usize], sorts: &[SortId], mut index: usize) -> Vec<usize> {
    let mut out = vec![0; sorts.len()];
    for k in (0..sorts.len()).rev() {
        let n = carriers[sorts[k]];
        out[k] = index % n;
        index /= n;
    }
    out
}

impl FiniteModel {
    /// All relations empty, all functions constantly `0`.
    pub fn empty(sig: &Signature, carriers: Vec<usize>) -> Result<Self> {
        if carriers.len() != sig.sort_count() {
            return Err(Error::Signature("one carrier per sort is required".into()));
        }
        let relations = sig.relations().iter().map(|r| vec![false; table_size(&carriers, &r.arity)]).collect();
        let mut functions = Vec::new();
        for f in sig.functions() {
            let n = table_size(&carriers, &f.args);
            if n > 0 && carriers[f.result] == 0 {
                return Err(Error::Signature(format!("`{}` has no possible values", f.name)));
            }
            functions.push(vec![0; n]);
        }
        Ok(FiniteModel { carriers, relations, functions })
    }

    pub fn from_tuples(sig: &Signature, carriers: Vec<usize>, relations: &[(&str, &[&[usize]])]) -> Result<Self> {
        let mut m = Self::empty(sig, carriers)?;
        for (name, tuples) in relations {
            let r = sig.relation(name).ok_or_else(|| Error::Signature(format!("unknown relation symbol `{name}`")))?;
            for t in *tuples {
                m.set(sig, r, t, true)?;
            }
        }
        Ok(m)
    }

    pub fn carriers(&self) -> &[usize] {
        &self.carriers
    }

    fn check_args(&self, sorts: &[SortId], args: &[usize]) -> Result<()> {
        if args.len() != sorts.len() {
            return Err(Error::IllSorted(format!("expected {} arguments, got {}", sorts.len(), args.len())));
        }
        for (&a, &s) in args.iter().zip(sorts) {
            if a >= self.carriers[s] {
                return Err(Error::NotInCarrier { element: a, len: self.carriers[s] });
            }
        }
        Ok(())
    }

    pub fn holds(&self, sig: &Signature, r: usize, args: &[usize]) -> bool {
        self.relations[r][index_of(&self.carriers, &sig.relations()[r].arity, args)]
    }

    pub fn set(&mut self, sig: &Signature, r: usize, args: &[usize], value: bool) -> Result<()> {
        let arity = &sig.relations()[r].arity;
        self.check_args(arity, args)?;
        let i = index_of(&self.carriers, arity, args);
        self.relations[r][i] = value;
        Ok(())
    }

    pub fn apply(&self, sig: &Signature, f: usize, args: &[usize]) -> usize {
        self.functions[f][index_of(&self.carriers, &sig.functions()[f].args, args)]
    }

    pub fn set_value(&mut self, sig: &Signature, f: usize, args: &[usize], value: usize) -> Result<()> {
        let decl = &sig.functions()[f];
        self.check_args(&decl.args, args)?;
        if value >= self.carriers[decl.result] {
            return Err(Error::NotInCarrier { element: value, len: self.carriers[decl.result] });
        }
        let i = index_of(&self.carriers, &decl.args, args);
        self.functions[f][i] = value;
        Ok(())
    }

    pub fn tuples(&self, sig: &Signature, r: usize) -> Vec<Vec<usize>> {
        let arity = &sig.relations()[r].arity;
        (0..self.relations[r].len()).filter(|&i| self.relations[r][i]).map(|i| tuple_of(&self.carriers, arity, i)).collect()
    }

    pub fn to_doc(&self, sig: &Signature) -> ModelDoc {
        ModelDoc {
            carriers: (0..sig.sort_count()).map(|s| (sig.sort_name(s).to_string(), self.carriers[s])).collect(),
            relations: sig.relations().iter().enumerate().map(|(r, d)| (d.name.clone(), self.tuples(sig, r))).collect(),
            functions: sig
                .functions()
                .iter()
                .enumerate()
                .map(|(f, d)| {
                    let rows = (0..self.functions[f].len())
                        .map(|i| (tuple_of(&self.carriers, &d.args, i), self.functions[f][i]))
                        .collect();
                    (d.name.clone(), rows)
                })
                .collect(),
        }
    }

    pub fn from_doc(sig: &Signature, doc: &ModelDoc) -> Result<Self> {
        let carriers = sig
            .sorts()
            .iter()
            .map(|s| doc.carriers.get(s).copied().ok_or_else(|| Error::Signature(format!("no carrier for sort `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        let mut m = Self::empty(sig, carriers)?;
        for (name, tuples) in &doc.relations {
            let r = sig.relation(name).ok_or_else(|| Error::Signature(format!("unknown relation symbol `{name}`")))?;
            for t in tuples {
                m.set(sig, r, t, true)?;
            }
        }
        for (name, rows) in &doc.functions {
            let f = sig.function(name).ok_or_else(|| Error::Signature(format!("unknown function symbol `{name}`")))?;
            for (args, v) in rows {
                m.set_value(sig, f, args, *v)?;
            }
        }
        Ok(m)
    }
}

/// Context tuples satisfying one disjunct.
fn eval_disjunct(sig: &Signature, m: &FiniteModel, context: &[(String, SortId)], d: &Disjunct, out: &mut BTreeSet<Vec<usize>>) {
    let h = &d.object;
    let vars: Vec<(SortId, usize)> = (0..sig.sort_count()).flat_map(|s| (0..h.mult(s)).map(move |i| (s, i))).collect();
    let mut slot: HashMap<(SortId, usize), usize> = HashMap::new();
    for (k, &v) in vars.iter().enumerate() {
        slot.insert(v, k);
    }
    let mut checks: Vec<Vec<(usize, Vec<usize>)>> = vec![Vec::new(); vars.len() + 1];
    for (r, args) in h.instances() {
        let arity = &sig.relations()[*r].arity;
        let slots: Vec<usize> = args.iter().zip(arity).map(|(&i, &s)| slot[&(s, i)]).collect();
        let last = slots.iter().map(|&k| k + 1).max().unwrap_or(0);
        checks[last].push((*r, slots));
    }
    let proj: Vec<usize> = context.iter().zip(&d.context_map).map(|((_, s), &i)| slot[&(*s, i)]).collect();
    let mut values = vec![0; vars.len()];
    #[allow(clippy::too_many_arguments)]
    fn go(
        sig: &Signature,
        m: &FiniteModel,
        vars: &[(SortId, usize)],
        checks: &[Vec<(usize, Vec<usize>)>],
        proj: &[usize],
        k: usize,
        values: &mut Vec<usize>,
        out: &mut BTreeSet<Vec<usize>>,
    ) {
        let ok = checks[k].iter().all(|(r, slots)| {
            let args: Vec<usize> = slots.iter().map(|&j| values[j]).collect();
            m.holds(sig, *r, &args)
        });
        if !ok {
            return;
        }
        if k == vars.len() {
            out.insert(proj.iter().map(|&j| values[j]).collect());
            return;
        }
        for v in 0..m.carriers[vars[k].0] {
            values[k] = v;
            go(sig, m, vars, checks, proj, k + 1, values, out);
        }
    }
    go(sig, m, &vars, &checks, &proj, 0, &mut values, out);
}

/// The context tuples satisfying the formula.
pub fn eval_formula(sig: &Signature, m: &FiniteModel, nf: &GeometricFormulaNF) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    for d in &nf.disjuncts {
        eval_disjunct(sig, m, &nf.context, d, &mut out);
    }
    out
}

pub fn holds_in_model(sig: &Signature, m: &FiniteModel, s: &Sequent) -> bool {
    eval_formula(sig, m, &s.lhs).is_subset(&eval_formula(sig, m, &s.rhs))
}

fn eval_term(sig: &Signature, m: &FiniteModel, env: &HashMap<String, usize>, t: &Term) -> Result<usize> {
    match t {
        Term::Var(v) => env.get(v).copied().ok_or_else(|| Error::IllSorted(format!("variable `{v}` is not in context"))),
        Term::App(f, args) => {
            let id = sig.function(f).ok_or_else(|| Error::Signature(format!("unknown function symbol `{f}`")))?;
            let vals = args.iter().map(|a| eval_term(sig, m, env, a)).collect::<Result<Vec<_>>>()?;
            Ok(m.apply(sig, id, &vals))
        }
    }
}

/// Direct Tarski semantics of a formula tree, terms included.
pub fn eval_ast(sig: &Signature, m: &FiniteModel, env: &HashMap<String, usize>, f: &Formula) -> Result<bool> {
    Ok(match f {
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Atom(r, args) => {
            let id = sig.relation(r).ok_or_else(|| Error::Signature(format!("unknown relation symbol `{r}`")))?;
            let vals = args.iter().map(|a| eval_term(sig, m, env, a)).collect::<Result<Vec<_>>>()?;
            m.holds(sig, id, &vals)
        }
        Formula::Eq(a, b) => eval_term(sig, m, env, a)? == eval_term(sig, m, env, b)?,
        Formula::And(fs) => {
            for g in fs {
                if !eval_ast(sig, m, env, g)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Or(fs) => {
            for g in fs {
                if eval_ast(sig, m, env, g)? {
                    return Ok(true);
                }
            }
            false
        }
        Formula::Exists(vs, body) => {
            let sorts = vs.iter().map(|(_, s)| sig.sort(s)).collect::<Result<Vec<_>>>()?;
            let total: usize = sorts.iter().map(|&s| m.carriers[s]).product();
            let mut inner = env.clone();
            for i in 0..total {
                let t = tuple_of(&m.carriers, &sorts, i);
                for ((v, _), x) in vs.iter().zip(t) {
                    inner.insert(v.clone(), x);
                }
                if eval_ast(sig, m, &inner, body)? {
                    return Ok(true);
                }
            }
            false
        }
    })
}

/// Context tuples satisfying a formula tree.
pub fn eval_ast_tuples(sig: &Signature, m: &FiniteModel, context: &[(String, SortId)], f: &Formula) -> Result<BTreeSet<Vec<usize>>> {
    let sorts: Vec<SortId> = context.iter().map(|(_, s)| *s).collect();
    let mut out = BTreeSet::new();
    for i in 0..table_size(&m.carriers, &sorts) {
        let t = tuple_of(&m.carriers, &sorts, i);
        let env = context.iter().map(|(v, _)| v.clone()).zip(t.iter().copied()).collect();
        if eval_ast(sig, m, &env, f)? {
            out.insert(t);
        }
    }
    Ok(out)
}

/// The relational model whose graph relations record the functions of `m`.
pub fn graph_model(rel: &Relationalized, m: &FiniteModel) -> FiniteModel {
    let (src, sig) = (&rel.source, &rel.signature);
    let mut out = FiniteModel::empty(sig, m.carriers.clone()).expect("same sorts");
    for r in 0..src.relations().len() {
        out.relations[r] = m.relations[r].clone();
    }
    for (f, decl) in src.functions().iter().enumerate() {
        for i in 0..m.functions[f].len() {
            let mut args = tuple_of(&m.carriers, &decl.args, i);
            args.push(m.functions[f][i]);
            out.set(sig, rel.graph_of(f), &args, true).expect("value in carrier");
        }
    }
    out
}

/// Calls `visit` on every model with the given carriers until it returns
/// `false`. Returns whether the enumeration ran to the end.
pub fn for_each_model(sig: &Signature, carriers: &[usize], mut visit: impl FnMut(&FiniteModel) -> bool) -> bool {
    let Ok(mut m) = FiniteModel::empty(sig, carriers.to_vec()) else { return true };
    // Digits: relation cells (base 2), then function cells.
    let mut digits: Vec<(bool, usize, usize, usize)> = Vec::new();
    for (r, t) in m.relations.iter().enumerate() {
        digits.extend((0..t.len()).map(|i| (true, r, i, 2)));
    }
    for (f, t) in m.functions.iter().enumerate() {
        let base = carriers[sig.functions()[f].result];
        digits.extend((0..t.len()).map(|i| (false, f, i, base)));
    }
    loop {
        if !visit(&m) {
            return false;
        }
        let mut k = 0;
        loop {
            let Some(&(is_rel, t, i, base)) = digits.get(k) else { return true };
            if is_rel {
                m.relations[t][i] = !m.relations[t][i];
                if m.relations[t][i] {
                    break;
                }
            } else {
                m.functions[t][i] = (m.functions[t][i] + 1) % base;
                if m.functions[t][i] != 0 {
                    break;
                }
            }
            k += 1;
        }
    }
}

/// Carrier vectors with entries in `0..=max`, by total size then
/// lexicographically.
pub fn carrier_vectors(sorts: usize, max: usize) -> Vec<Vec<usize>> {
    let mut all = vec![Vec::new()];
    for _ in 0..sorts {
        all = all.into_iter().flat_map(|v: Vec<usize>| (0..=max).map(move |n| [v.clone(), vec![n]].concat())).collect();
    }
    all.sort_by_key(|v| (v.iter().sum::<usize>(), v.clone()));
    all
}

/// The first model with carriers at most `max` satisfying every axiom and
/// refuting the goal.
pub fn find_countermodel(sig: &Signature, axioms: &[Sequent], goal: &Sequent, max: usize) -> Option<FiniteModel> {
    let mut found = None;
    for carriers in carrier_vectors(sig.sort_count(), max) {
        for_each_model(sig, &carriers, |m| {
            if axioms.iter().all(|a| holds_in_model(sig, m, a)) && !holds_in_model(sig, m, goal) {
                found = Some(m.clone());
                return false;
            }
            true
        });
        if found.is_some() {
            break;
        }
    }
    found
}
