use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type SortId = usize;
pub type RelId = usize;
pub type FunId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationDecl {
    pub name: String,
    pub arity: Vec<SortId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionDecl {
    pub name: String,
    pub args: Vec<SortId>,
    pub result: SortId,
}

/// Sorts, relation symbols and function symbols. A signature without
/// function symbols is relational.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    sorts: Vec<String>,
    relations: Vec<RelationDecl>,
    functions: Vec<FunctionDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionEntry {
    pub args: Vec<String>,
    pub result: String,
}

/// Signature file block.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureDoc {
    pub sorts: Vec<String>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub functions: BTreeMap<String, FunctionEntry>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

impl Signature {
    pub fn new<S: AsRef<str>>(sorts: &[S]) -> Result<Self> {
        let mut sig = Signature::default();
        for s in sorts {
            let s = s.as_ref();
            if !valid_name(s) {
                return Err(Error::Signature(format!("`{s}` is not a valid sort name")));
            }
            if sig.sorts.iter().any(|t| t == s) {
                return Err(Error::Signature(format!("sort `{s}` is declared twice")));
            }
            sig.sorts.push(s.to_string());
        }
        Ok(sig)
    }

    /// Shorthand for a relational signature.
    pub fn relational(sorts: &[&str], relations: &[(&str, &[&str])]) -> Result<Self> {
        let mut sig = Self::new(sorts)?;
        for (name, arity) in relations {
            sig.add_relation(name, arity)?;
        }
        Ok(sig)
    }

    fn check_fresh(&self, name: &str) -> Result<()> {
        if !valid_name(name) {
            return Err(Error::Signature(format!("`{name}` is not a valid symbol name")));
        }
        if self.relation(name).is_some() || self.function(name).is_some() {
            return Err(Error::Signature(format!("symbol `{name}` is declared twice")));
        }
        Ok(())
    }

    pub fn add_relation<S: AsRef<str>>(&mut self, name: &str, arity: &[S]) -> Result<RelId> {
        self.check_fresh(name)?;
        let arity = arity.iter().map(|s| self.sort(s.as_ref())).collect::<Result<_>>()?;
        self.relations.push(RelationDecl { name: name.into(), arity });
        Ok(self.relations.len() - 1)
    }

    pub fn add_function<S: AsRef<str>>(&mut self, name: &str, args: &[S], result: &str) -> Result<FunId> {
        self.check_fresh(name)?;
        let args = args.iter().map(|s| self.sort(s.as_ref())).collect::<Result<_>>()?;
        let result = self.sort(result)?;
        self.functions.push(FunctionDecl { name: name.into(), args, result });
        Ok(self.functions.len() - 1)
    }

    pub fn from_doc(doc: &SignatureDoc) -> Result<Self> {
        let mut sig = Self::new(&doc.sorts)?;
        for (name, arity) in &doc.relations {
            sig.add_relation(name, arity)?;
        }
        for (name, f) in &doc.functions {
            sig.add_function(name, &f.args, &f.result)?;
        }
        Ok(sig)
    }

    pub fn to_doc(&self) -> SignatureDoc {
        let names = |ids: &[SortId]| ids.iter().map(|&s| self.sorts[s].clone()).collect();
        SignatureDoc {
            sorts: self.sorts.clone(),
            relations: self.relations.iter().map(|r| (r.name.clone(), names(&r.arity))).collect(),
            functions: self
                .functions
                .iter()
                .map(|f| (f.name.clone(), FunctionEntry { args: names(&f.args), result: self.sorts[f.result].clone() }))
                .collect(),
        }
    }

    pub fn sort(&self, name: &str) -> Result<SortId> {
        self.sorts.iter().position(|s| s == name).ok_or_else(|| Error::Signature(format!("unknown sort `{name}`")))
    }

    pub fn sort_name(&self, s: SortId) -> &str {
        &self.sorts[s]
    }

    pub fn sort_count(&self) -> usize {
        self.sorts.len()
    }

    pub fn sorts(&self) -> &[String] {
        &self.sorts
    }

    pub fn relation(&self, name: &str) -> Option<RelId> {
        self.relations.iter().position(|r| r.name == name)
    }

    pub fn function(&self, name: &str) -> Option<FunId> {
        self.functions.iter().position(|f| f.name == name)
    }

    pub fn relations(&self) -> &[RelationDecl] {
        &self.relations
    }

    pub fn functions(&self) -> &[FunctionDecl] {
        &self.functions
    }

    pub fn is_relational(&self) -> bool {
        self.functions.is_empty()
    }

    /// The same sorts and relations, without function symbols.
    pub fn relational_part(&self) -> Signature {
        Signature { sorts: self.sorts.clone(), relations: self.relations.clone(), functions: Vec::new() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn declarations_are_checked() {
        let mut sig = Signature::relational(&["A", "B"], &[("R", &["A", "B"])]).unwrap();
        assert!(sig.is_relational());
        assert!(sig.add_relation("R", &["A"]).is_err());
        assert!(sig.add_relation("S", &["C"]).is_err());
        sig.add_function("f", &["A"], "B").unwrap();
        assert!(sig.add_function("f", &["A"], "A").is_err());
        assert!(Signature::new(&["A", "A"]).is_err());
        assert_eq!(Signature::from_doc(&sig.to_doc()).unwrap(), sig);
    }
}
