//! Formula trees and their text syntax.
//!
//! ```text
//! sequent  := [context] formula ('⊢' | '|-') formula
//! context  := '[' (var ':' sort (',' var ':' sort)*)? ']'
//! formula  := conj (('∨' | 'or' | '\/') conj)*
//! conj     := unary (('∧' | 'and' | '/\') unary)*
//! unary    := '⊤' | 'true' | '⊥' | 'false' | '(' formula ')'
//!           | ('∃' | 'exists') var ':' sort (',' var ':' sort)* '.' formula
//!           | term '=' term | Rel '(' terms ')' | Rel
//! term     := var | fun '(' terms ')'
//! ```

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::signature::{Signature, SortId};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    Top,
    Bottom,
    Atom(String, Vec<Term>),
    Eq(Term, Term),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    /// Bound variables with their sort names.
    Exists(Vec<(String, String)>, Box<Formula>),
}

/// A sequent as written: an optional explicit context and two formulas.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequentAst {
    pub context: Option<Vec<(String, String)>>,
    pub lhs: Formula,
    pub rhs: Formula,
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.into())
    }
}

impl Formula {
    pub fn atom(rel: &str, vars: &[&str]) -> Formula {
        Formula::Atom(rel.into(), vars.iter().map(|v| Term::var(v)).collect())
    }

    pub fn and(parts: Vec<Formula>) -> Formula {
        Formula::And(parts)
    }

    pub fn exists(vars: &[(&str, &str)], body: Formula) -> Formula {
        Formula::Exists(vars.iter().map(|(v, s)| (v.to_string(), s.to_string())).collect(), Box::new(body))
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        fn term(t: &Term, bound: &[String], out: &mut Vec<String>) {
            match t {
                Term::Var(v) => {
                    if !bound.contains(v) && !out.contains(v) {
                        out.push(v.clone());
                    }
                }
                Term::App(_, args) => args.iter().for_each(|a| term(a, bound, out)),
            }
        }
        fn go(f: &Formula, bound: &mut Vec<String>, out: &mut Vec<String>) {
            match f {
                Formula::Top | Formula::Bottom => {}
                Formula::Atom(_, args) => args.iter().for_each(|a| term(a, bound, out)),
                Formula::Eq(a, b) => {
                    term(a, bound, out);
                    term(b, bound, out);
                }
                Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| go(g, bound, out)),
                Formula::Exists(vs, body) => {
                    let n = bound.len();
                    bound.extend(vs.iter().map(|(v, _)| v.clone()));
                    go(body, bound, out);
                    bound.truncate(n);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for Term {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(out, "{v}"),
            Term::App(f, args) => {
                write!(out, "{f}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(out, ",")?;
                    }
                    write!(out, "{a}")?;
                }
                write!(out, ")")
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let joined = |out: &mut fmt::Formatter<'_>, fs: &[Formula], sep: &str| -> fmt::Result {
            write!(out, "(")?;
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    write!(out, " {sep} ")?;
                }
                write!(out, "{g}")?;
            }
            write!(out, ")")
        };
        match self {
            Formula::Top => write!(out, "⊤"),
            Formula::Bottom => write!(out, "⊥"),
            Formula::Atom(r, args) if args.is_empty() => write!(out, "{r}"),
            Formula::Atom(r, args) => write!(out, "{}", Term::App(r.clone(), args.clone())),
            Formula::Eq(a, b) => write!(out, "{a} = {b}"),
            Formula::And(fs) if fs.is_empty() => write!(out, "⊤"),
            Formula::Or(fs) if fs.is_empty() => write!(out, "⊥"),
            Formula::And(fs) => joined(out, fs, "∧"),
            Formula::Or(fs) => joined(out, fs, "∨"),
            Formula::Exists(vs, body) => {
                write!(out, "(∃")?;
                for (i, (v, s)) in vs.iter().enumerate() {
                    write!(out, "{}{v}:{s}", if i > 0 { "," } else { "" })?;
                }
                write!(out, ". {body})")
            }
        }
    }
}

impl fmt::Display for SequentAst {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(ctx) = &self.context {
            let parts: Vec<String> = ctx.iter().map(|(v, s)| format!("{v}:{s}")).collect();
            write!(out, "[{}] ", parts.join(", "))?;
        }
        write!(out, "{} ⊢ {}", self.lhs, self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Dot,
    Equals,
    And,
    Or,
    Exists,
    Top,
    Bottom,
    Turnstile,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |column: usize, message: String| Error::Parse { column, message };
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        let two: String = chars[i..chars.len().min(i + 2)].iter().collect();
        let tok = match c {
            _ if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            ':' => Tok::Colon,
            '.' => Tok::Dot,
            '=' => Tok::Equals,
            '∧' => Tok::And,
            '∨' => Tok::Or,
            '∃' => Tok::Exists,
            '⊤' => Tok::Top,
            '⊥' => Tok::Bottom,
            '⊢' => Tok::Turnstile,
            '⋁' | '⋀' | '∀' => return Err(err(col, format!("`{c}` is not allowed: only finite ∨, ∧ and ∃ are supported"))),
            _ if two == "/\\" => {
                i += 2;
                out.push((Tok::And, col));
                continue;
            }
            _ if two == "\\/" => {
                i += 2;
                out.push((Tok::Or, col));
                continue;
            }
            _ if two == "|-" => {
                i += 2;
                out.push((Tok::Turnstile, col));
                continue;
            }
            _ if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                let tok = match word.as_str() {
                    "and" => Tok::And,
                    "or" => Tok::Or,
                    "exists" => Tok::Exists,
                    "true" => Tok::Top,
                    "false" => Tok::Bottom,
                    "bigor" | "forall" => {
                        return Err(err(col, format!("`{word}` is not allowed: only finite ∨, ∧ and ∃ are supported")))
                    }
                    _ => Tok::Ident(word),
                };
                out.push((tok, col));
                continue;
            }
            _ => return Err(err(col, format!("unexpected character `{c}`"))),
        };
        out.push((tok, col));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        Ok(Parser { toks: lex(text)?, pos: 0, end: text.chars().count() + 1 })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |&(_, c)| c)
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { column: self.column(), message: message.into() })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            self.fail(format!("expected {what}"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(name)) => {
                let name = name.clone();
                self.pos += 1;
                Ok(name)
            }
            _ => self.fail(format!("expected {what}")),
        }
    }

    fn typed_vars(&mut self) -> Result<Vec<(String, String)>> {
        let mut vars = Vec::new();
        loop {
            let v = self.ident("a variable")?;
            self.expect(&Tok::Colon, "`:`")?;
            let s = self.ident("a sort")?;
            vars.push((v, s));
            if !self.eat(&Tok::Comma) {
                return Ok(vars);
            }
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut parts = vec![self.conj()?];
        while self.eat(&Tok::Or) {
            parts.push(self.conj()?);
        }
        Ok(if parts.len() == 1 { parts.pop().expect("one part") } else { Formula::Or(parts) })
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut parts = vec![self.unary()?];
        while self.eat(&Tok::And) {
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().expect("one part") } else { Formula::And(parts) })
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek() {
            Some(Tok::Top) => {
                self.pos += 1;
                Ok(Formula::Top)
            }
            Some(Tok::Bottom) => {
                self.pos += 1;
                Ok(Formula::Bottom)
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Exists) => {
                self.pos += 1;
                let vars = self.typed_vars()?;
                self.expect(&Tok::Dot, "`.` after the bound variables")?;
                // The body extends as far right as possible.
                Ok(Formula::Exists(vars, Box::new(self.formula()?)))
            }
            Some(Tok::Ident(_)) => {
                let head = self.term()?;
                if self.eat(&Tok::Equals) {
                    return Ok(Formula::Eq(head, self.term()?));
                }
                match head {
                    Term::Var(r) => Ok(Formula::Atom(r, Vec::new())),
                    Term::App(r, args) => Ok(Formula::Atom(r, args)),
                }
            }
            _ => self.fail("expected a formula"),
        }
    }

    fn term(&mut self) -> Result<Term> {
        let name = self.ident("a term")?;
        if !self.eat(&Tok::LParen) {
            return Ok(Term::Var(name));
        }
        let mut args = Vec::new();
        if !self.eat(&Tok::RParen) {
            loop {
                args.push(self.term()?);
                if self.eat(&Tok::RParen) {
                    break;
                }
                self.expect(&Tok::Comma, "`,` or `)`")?;
            }
        }
        Ok(Term::App(name, args))
    }

    fn finish(&self) -> Result<()> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            self.fail("unexpected trailing input")
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_sequent(text: &str) -> Result<SequentAst> {
    let mut p = Parser::new(text)?;
    let context = if p.eat(&Tok::LBracket) {
        let vars = if p.peek() == Some(&Tok::RBracket) { Vec::new() } else { p.typed_vars()? };
        p.expect(&Tok::RBracket, "`]`")?;
        Some(vars)
    } else {
        None
    };
    let lhs = p.formula()?;
    p.expect(&Tok::Turnstile, "`⊢` or `|-`")?;
    let rhs = p.formula()?;
    p.finish()?;
    Ok(SequentAst { context, lhs, rhs })
}

/// Sort of a term under `env`, checking every application on the way.
pub fn term_sort(sig: &Signature, env: &HashMap<String, SortId>, t: &Term) -> Result<SortId> {
    match t {
        Term::Var(v) => env.get(v).copied().ok_or_else(|| Error::IllSorted(format!("variable `{v}` is not in context"))),
        Term::App(f, args) => {
            let id = sig.function(f).ok_or_else(|| Error::Signature(format!("unknown function symbol `{f}`")))?;
            let decl = &sig.functions()[id];
            if decl.args.len() != args.len() {
                return Err(Error::IllSorted(format!("`{f}` takes {} arguments, got {}", decl.args.len(), args.len())));
            }
            for (a, &want) in args.iter().zip(&decl.args) {
                let got = term_sort(sig, env, a)?;
                if got != want {
                    return Err(Error::IllSorted(format!(
                        "argument `{a}` of `{f}` has sort {}, expected {}",
                        sig.sort_name(got),
                        sig.sort_name(want)
                    )));
                }
            }
            Ok(decl.result)
        }
    }
}

/// Checks that `f` is well sorted with free variables typed by `env`.
pub fn check_sorts(sig: &Signature, env: &HashMap<String, SortId>, f: &Formula) -> Result<()> {
    match f {
        Formula::Top | Formula::Bottom => Ok(()),
        Formula::Atom(r, args) => {
            let id = sig.relation(r).ok_or_else(|| Error::Signature(format!("unknown relation symbol `{r}`")))?;
            let arity = &sig.relations()[id].arity;
            if arity.len() != args.len() {
                return Err(Error::IllSorted(format!("`{r}` takes {} arguments, got {}", arity.len(), args.len())));
            }
            for (a, &want) in args.iter().zip(arity) {
                let got = term_sort(sig, env, a)?;
                if got != want {
                    return Err(Error::IllSorted(format!(
                        "argument `{a}` of `{r}` has sort {}, expected {}",
                        sig.sort_name(got),
                        sig.sort_name(want)
                    )));
                }
            }
            Ok(())
        }
        Formula::Eq(a, b) => {
            let (sa, sb) = (term_sort(sig, env, a)?, term_sort(sig, env, b)?);
            if sa != sb {
                return Err(Error::IllSorted(format!("`{a} = {b}` compares sorts {} and {}", sig.sort_name(sa), sig.sort_name(sb))));
            }
            Ok(())
        }
        Formula::And(fs) | Formula::Or(fs) => fs.iter().try_for_each(|g| check_sorts(sig, env, g)),
        Formula::Exists(vs, body) => {
            let mut inner = env.clone();
            for (v, s) in vs {
                inner.insert(v.clone(), sig.sort(s)?);
            }
            check_sorts(sig, &inner, body)
        }
    }
}

/// Sorts for the free variables of the formulas, read off their positions.
pub fn infer_context(sig: &Signature, formulas: &[&Formula]) -> Result<Vec<(String, SortId)>> {
    let mut order: Vec<String> = Vec::new();
    for f in formulas {
        for v in f.free_vars() {
            if !order.contains(&v) {
                order.push(v);
            }
        }
    }
    let mut known: HashMap<String, SortId> = HashMap::new();
    fn note(sig: &Signature, known: &mut HashMap<String, SortId>, v: &str, s: SortId) -> Result<bool> {
        match known.get(v) {
            Some(&t) if t != s => Err(Error::IllSorted(format!(
                "variable `{v}` is used at sorts {} and {}",
                sig.sort_name(t),
                sig.sort_name(s)
            ))),
            Some(_) => Ok(false),
            None => {
                known.insert(v.to_string(), s);
                Ok(true)
            }
        }
    }
    fn term(sig: &Signature, known: &mut HashMap<String, SortId>, bound: &[String], t: &Term, want: Option<SortId>) -> Result<bool> {
        match t {
            Term::Var(v) if bound.contains(v) => Ok(false),
            Term::Var(v) => match want {
                Some(s) => note(sig, known, v, s),
                None => Ok(false),
            },
            Term::App(f, args) => {
                let Some(id) = sig.function(f) else { return Ok(false) };
                let decl = sig.functions()[id].clone();
                let mut changed = false;
                for (a, s) in args.iter().zip(decl.args) {
                    changed |= term(sig, known, bound, a, Some(s))?;
                }
                Ok(changed)
            }
        }
    }
    fn result_sort(sig: &Signature, known: &HashMap<String, SortId>, bound: &HashMap<String, SortId>, t: &Term) -> Option<SortId> {
        match t {
            Term::Var(v) => bound.get(v).or_else(|| known.get(v)).copied(),
            Term::App(f, _) => sig.function(f).map(|id| sig.functions()[id].result),
        }
    }
    fn go(
        sig: &Signature,
        known: &mut HashMap<String, SortId>,
        bound: &mut HashMap<String, SortId>,
        f: &Formula,
    ) -> Result<bool> {
        let names: Vec<String> = bound.keys().cloned().collect();
        match f {
            Formula::Top | Formula::Bottom => Ok(false),
            Formula::Atom(r, args) => {
                let Some(id) = sig.relation(r) else { return Ok(false) };
                let arity = sig.relations()[id].arity.clone();
                let mut changed = false;
                for (a, s) in args.iter().zip(arity) {
                    changed |= term(sig, known, &names, a, Some(s))?;
                }
                Ok(changed)
            }
            Formula::Eq(a, b) => {
                let sa = result_sort(sig, known, bound, a);
                let sb = result_sort(sig, known, bound, b);
                let mut changed = term(sig, known, &names, a, sb)?;
                changed |= term(sig, known, &names, b, sa)?;
                Ok(changed)
            }
            Formula::And(fs) | Formula::Or(fs) => {
                let mut changed = false;
                for g in fs {
                    changed |= go(sig, known, bound, g)?;
                }
                Ok(changed)
            }
            Formula::Exists(vs, body) => {
                let saved = bound.clone();
                for (v, s) in vs {
                    bound.insert(v.clone(), sig.sort(s)?);
                }
                let changed = go(sig, known, bound, body);
                *bound = saved;
                changed
            }
        }
    }
    loop {
        let mut changed = false;
        for f in formulas {
            changed |= go(sig, &mut known, &mut HashMap::new(), f)?;
        }
        if !changed {
            break;
        }
    }
    order
        .into_iter()
        .map(|v| match known.get(&v) {
            Some(&s) => Ok((v, s)),
            None => Err(Error::IllSorted(format!("cannot determine the sort of `{v}`"))),
        })
        .collect()
}
