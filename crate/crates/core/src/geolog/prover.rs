//! Bounded provability as coverage in the syntactic category.
//!
//! Each sequent becomes one presieve per disjunct of its left side. A goal
//! is proved when every goal presieve is covered by the topology generated
//! by the axiom presieves, witnessed by a multi-covering whose leaves
//! factor through goal members.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::horn::{Disjunct, GeometricFormulaNF, Relationalized, Sequent, relationalize};
use super::signature::{Signature, SignatureDoc};
use super::syntactic::{factor_through, horn_pullback, is_split_epi, syntactic_homs, SyntacticMorphism};
use super::syntax::parse_sequent;
use super::horn::HornObject;
use crate::error::{Error, Result};
use crate::topology::{validate_multicovering, CoveringNotion, MultiCovering, Tree};

pub const DEFAULT_DEPTH: usize = 6;
pub const DEFAULT_CONTEXT_BOUND: usize = 8;
/// Search nodes visited before giving up on one goal presieve.
pub const NODE_BUDGET: usize = 200_000;

/// A presieve on a Horn object, given by its members.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalPresieve {
    pub target: HornObject,
    pub members: Vec<SyntacticMorphism>,
}

fn to_context(sig: &Signature, nf: &GeometricFormulaNF, d: &Disjunct) -> SyntacticMorphism {
    let mut maps = vec![Vec::new(); sig.sort_count()];
    for ((_, s), &i) in nf.context.iter().zip(&d.context_map) {
        maps[*s].push(i);
    }
    let bare = HornObject::context(nf.context_mult(sig));
    SyntacticMorphism::new(sig, d.object.clone(), bare, maps).expect("context variables of a disjunct")
}

/// One presieve per disjunct `φ` of the left side, with a member
/// `φ ∧ ψ → φ` for each disjunct `ψ` of the right side.
pub fn sequent_presieves(sig: &Signature, s: &Sequent) -> Vec<GoalPresieve> {
    s.lhs
        .disjuncts
        .iter()
        .map(|phi| {
            let f = to_context(sig, &s.lhs, phi);
            let members = s
                .rhs
                .disjuncts
                .iter()
                .map(|psi| {
                    let g = to_context(sig, &s.rhs, psi);
                    horn_pullback(sig, &f, &g).expect("common bare context").to_first
                })
                .collect();
            GoalPresieve { target: phi.object.clone(), members }
        })
        .collect()
}

/// The stable notion generated by the axiom presieves: a family covers
/// when one member has a section, or when some axiom presieve pulled back
/// along some morphism refines it.
#[derive(Clone, Debug)]
pub struct TheoryNotion {
    pub signature: Signature,
    pub axioms: Vec<GoalPresieve>,
}

impl TheoryNotion {
    pub fn new(sig: &Signature, axioms: &[Sequent]) -> Self {
        TheoryNotion { signature: sig.clone(), axioms: axioms.iter().flat_map(|a| sequent_presieves(sig, a)).collect() }
    }

    fn refines_pulled_axiom(&self, at: &HornObject, family: &[SyntacticMorphism]) -> bool {
        let sig = &self.signature;
        self.axioms.iter().any(|ax| {
            syntactic_homs(sig, at, &ax.target).iter().any(|f| {
                ax.members.iter().all(|m| {
                    let pulled = horn_pullback(sig, f, m).expect("common target").to_first;
                    family.iter().any(|k| factor_through(sig, k, &pulled).is_some())
                })
            })
        })
    }
}

impl CoveringNotion for TheoryNotion {
    type Obj = HornObject;
    type Mor = SyntacticMorphism;
    fn dom(&self, f: &SyntacticMorphism) -> HornObject {
        f.from.clone()
    }
    fn cod(&self, f: &SyntacticMorphism) -> HornObject {
        f.to.clone()
    }
    fn compose(&self, g: &SyntacticMorphism, f: &SyntacticMorphism) -> SyntacticMorphism {
        g.after(f).expect("composable morphisms")
    }
    fn identity(&self, x: &HornObject) -> SyntacticMorphism {
        SyntacticMorphism::identity(x)
    }
    fn is_covering_family(&self, at: &HornObject, family: &[SyntacticMorphism]) -> bool {
        family.iter().all(|m| m.to == *at)
            && (family.iter().any(|m| is_split_epi(&self.signature, m)) || self.refines_pulled_axiom(at, family))
    }
    fn show_obj(&self, x: &HornObject) -> String {
        x.describe(&self.signature)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProofLeafReason {
    /// The branch composite equals `members[member] ∘ mediator`.
    Member { member: usize, mediator: SyntacticMorphism },
    /// The leaf maps into the target of an axiom presieve with no members.
    EmptyFamily { axiom: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofLeaf {
    pub level: usize,
    pub index: usize,
    pub reason: ProofLeafReason,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofCertificate {
    pub target: HornObject,
    pub members: Vec<SyntacticMorphism>,
    pub covering: MultiCovering<HornObject, SyntacticMorphism>,
    pub leaves: Vec<ProofLeaf>,
}

impl ProofCertificate {
    pub fn depth(&self) -> usize {
        self.covering.tree().depth()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProofOutcome {
    /// One certificate per goal presieve.
    Proved { certificates: Vec<ProofCertificate> },
    /// No certificate within the bounds. `budget_exhausted` records that
    /// the node budget, not the bounds, stopped the search.
    Unknown { budget_exhausted: bool },
}

impl ProofOutcome {
    pub fn is_proved(&self) -> bool {
        matches!(self, ProofOutcome::Proved { .. })
    }

    /// Deepest certificate, if proved.
    pub fn depth(&self) -> Option<usize> {
        match self {
            ProofOutcome::Proved { certificates } => Some(certificates.iter().map(ProofCertificate::depth).max().unwrap_or(0)),
            ProofOutcome::Unknown { .. } => None,
        }
    }
}

enum Node {
    Leaf(ProofLeafReason),
    Split(Vec<(SyntacticMorphism, Node)>),
}

struct Search<'a> {
    notion: &'a TheoryNotion,
    goal: &'a GoalPresieve,
    context_bound: usize,
    /// Largest depth at which a branch is known to fail.
    failed: HashMap<SyntacticMorphism, usize>,
    visited: usize,
}

impl Search<'_> {
    fn leaf(&self, branch: &SyntacticMorphism) -> Option<ProofLeafReason> {
        let sig = &self.notion.signature;
        for (i, m) in self.goal.members.iter().enumerate() {
            if let Some(k) = factor_through(sig, m, branch) {
                return Some(ProofLeafReason::Member { member: i, mediator: k });
            }
        }
        None
    }

    fn families(&self, h: &HornObject) -> Vec<Result<Vec<SyntacticMorphism>, usize>> {
        let sig = &self.notion.signature;
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (a, ax) in self.notion.axioms.iter().enumerate() {
            for f in syntactic_homs(sig, h, &ax.target) {
                if ax.members.is_empty() {
                    return vec![Err(a)];
                }
                let children: Vec<SyntacticMorphism> =
                    ax.members.iter().map(|m| horn_pullback(sig, &f, m).expect("common target").to_first).collect();
                if children.iter().any(|c| c.from.var_count() > self.context_bound || is_split_epi(sig, c)) {
                    continue;
                }
                let key: Vec<(HornObject, Vec<Vec<usize>>)> = children.iter().map(|c| (c.from.clone(), c.maps().to_vec())).collect();
                if seen.insert(key) {
                    out.push(Ok(children));
                }
            }
        }
        out
    }

    fn solve(&mut self, branch: &SyntacticMorphism, depth: usize) -> Option<Node> {
        if let Some(r) = self.leaf(branch) {
            return Some(Node::Leaf(r));
        }
        if self.failed.get(branch).is_some_and(|&d| d >= depth) || self.visited >= NODE_BUDGET {
            return None;
        }
        self.visited += 1;
        let h = branch.from.clone();
        for fam in self.families(&h) {
            match fam {
                Err(a) => return Some(Node::Leaf(ProofLeafReason::EmptyFamily { axiom: a })),
                Ok(_) if depth == 0 => {}
                Ok(children) => {
                    let wanted = children.len();
                    let mut solved = Vec::with_capacity(wanted);
                    for c in children {
                        match self.solve(&branch.after(&c).expect("child maps into parent"), depth - 1) {
                            Some(node) => solved.push((c, node)),
                            None => break,
                        }
                    }
                    if solved.len() == wanted {
                        return Some(Node::Split(solved));
                    }
                }
            }
        }
        let entry = self.failed.entry(branch.clone()).or_insert(0);
        *entry = (*entry).max(depth);
        None
    }
}

fn certificate(goal: &GoalPresieve, root: Node) -> ProofCertificate {
    let mut objects = vec![vec![goal.target.clone()]];
    let mut parents: Vec<Vec<usize>> = Vec::new();
    let mut morphisms: Vec<Vec<SyntacticMorphism>> = Vec::new();
    let mut leaves = Vec::new();
    let mut level = vec![root];
    let mut n = 0;
    while !level.is_empty() {
        let (mut ps, mut os, mut ms, mut next) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for (a, node) in level.into_iter().enumerate() {
            match node {
                Node::Leaf(reason) => leaves.push(ProofLeaf { level: n, index: a, reason }),
                Node::Split(children) => {
                    for (m, child) in children {
                        ps.push(a);
                        os.push(m.from.clone());
                        ms.push(m);
                        next.push(child);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        parents.push(ps);
        objects.push(os);
        morphisms.push(ms);
        level = next;
        n += 1;
    }
    let covering = MultiCovering::new(Tree::new(parents).expect("built level by level"), objects, morphisms)
        .expect("tables built together");
    ProofCertificate { target: goal.target.clone(), members: goal.members.clone(), covering, leaves }
}

/// Iterative deepening search for a certificate of every goal presieve.
pub fn prove_bounded(sig: &Signature, axioms: &[Sequent], goal: &Sequent, depth_bound: usize, context_bound: usize) -> Result<ProofOutcome> {
    if !sig.is_relational() {
        return Err(Error::Signature("the prover needs a relational signature".into()));
    }
    let width = sig.sort_count();
    for s in axioms.iter().chain([goal]) {
        let ok = [&s.lhs, &s.rhs].iter().all(|nf| nf.disjuncts.iter().all(|d| d.object.mults().len() == width));
        if !ok || s.context.iter().any(|(_, so)| *so >= width) {
            return Err(Error::Signature("sequent over a different signature".into()));
        }
    }
    let notion = TheoryNotion::new(sig, axioms);
    let mut certificates = Vec::new();
    for target in sequent_presieves(sig, goal) {
        let mut search = Search { notion: &notion, goal: &target, context_bound, failed: HashMap::new(), visited: 0 };
        let root = SyntacticMorphism::identity(&target.target);
        let mut found = None;
        for d in 0..=depth_bound {
            if let Some(node) = search.solve(&root, d) {
                found = Some(node);
                break;
            }
            if search.visited >= NODE_BUDGET {
                return Ok(ProofOutcome::Unknown { budget_exhausted: true });
            }
        }
        match found {
            Some(node) => certificates.push(certificate(&target, node)),
            None => return Ok(ProofOutcome::Unknown { budget_exhausted: false }),
        }
    }
    Ok(ProofOutcome::Proved { certificates })
}

/// Re-checks a certificate: tree shape, covering families at inner nodes
/// and a reason at every leaf.
pub fn validate_proof_certificate(notion: &TheoryNotion, cert: &ProofCertificate) -> Vec<String> {
    let sig = &notion.signature;
    let mut report = validate_multicovering(notion, &cert.covering);
    if *cert.covering.root() != cert.target {
        report.push("certificate root differs from the goal target".into());
    }
    if cert.members.iter().any(|m| m.to != cert.target) {
        report.push("goal member with a different target".into());
    }
    if !report.is_empty() {
        return report;
    }
    let tree = cert.covering.tree();
    let expected: BTreeSet<(usize, usize)> = tree.leaves().into_iter().collect();
    let listed: BTreeSet<(usize, usize)> = cert.leaves.iter().map(|l| (l.level, l.index)).collect();
    if expected != listed || listed.len() != cert.leaves.len() {
        report.push("leaf witnesses do not match the leaves of the tree".into());
    }
    for leaf in &cert.leaves {
        if leaf.level > tree.depth() || leaf.index >= tree.level_size(leaf.level) {
            continue;
        }
        let branch = cert.covering.branch(notion, leaf.level, leaf.index);
        let ok = match &leaf.reason {
            ProofLeafReason::Member { member, mediator } => cert
                .members
                .get(*member)
                .is_some_and(|m| mediator.from == branch.from && mediator.to == m.from && m.after(mediator).ok() == Some(branch.clone())),
            ProofLeafReason::EmptyFamily { axiom } => notion
                .axioms
                .get(*axiom)
                .is_some_and(|ax| ax.members.is_empty() && !syntactic_homs(sig, &branch.from, &ax.target).is_empty()),
        };
        if !ok {
            report.push(format!("leaf ({},{}): reason does not hold", leaf.level, leaf.index));
        }
    }
    report
}

/// Theory file: a signature and axioms written as sequents.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoryDoc {
    pub signature: SignatureDoc,
    #[serde(default)]
    pub axioms: Vec<String>,
}

/// Goal file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalDoc {
    pub goal: String,
}

/// A theory over a relational signature. Function symbols of the source
/// signature are replaced by their graphs, whose axioms are appended.
#[derive(Clone, Debug)]
pub struct Theory {
    pub source: Signature,
    pub relationalized: Relationalized,
    pub axioms: Vec<Sequent>,
}

impl Theory {
    pub fn new(source: Signature, axioms: &[&str]) -> Result<Self> {
        let relationalized = relationalize(&source)?;
        let mut out = Vec::new();
        for text in axioms {
            out.push(relationalized.translate_sequent(&parse_sequent(text)?)?);
        }
        out.extend(relationalized.axioms.iter().cloned());
        Ok(Theory { source, relationalized, axioms: out })
    }

    pub fn from_doc(doc: &TheoryDoc) -> Result<Self> {
        let axioms: Vec<&str> = doc.axioms.iter().map(String::as_str).collect();
        Self::new(Signature::from_doc(&doc.signature)?, &axioms)
    }

    /// The relational signature the axioms live over.
    pub fn signature(&self) -> &Signature {
        &self.relationalized.signature
    }

    pub fn sequent(&self, text: &str) -> Result<Sequent> {
        self.relationalized.translate_sequent(&parse_sequent(text)?)
    }

    pub fn notion(&self) -> TheoryNotion {
        TheoryNotion::new(self.signature(), &self.axioms)
    }

    pub fn prove(&self, goal: &Sequent, depth_bound: usize, context_bound: usize) -> Result<ProofOutcome> {
        prove_bounded(self.signature(), &self.axioms, goal, depth_bound, context_bound)
    }
}
