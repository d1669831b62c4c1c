//! Trees, multi-coverings and coverage certificates.

use std::collections::{HashMap, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::category::{MorId, ObjId};
use crate::error::{Error, Result};
use crate::sieve::{Presieve, Sieve, SieveLike};

use super::StableNotion;

/// Finite levels of nodes with parent maps; level 0 is the root alone.
///
/// `parents[n - 1][a]` is the parent (at level `n - 1`) of node `(n, a)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tree {
    parents: Vec<Vec<usize>>,
}

impl Tree {
    pub fn new(mut parents: Vec<Vec<usize>>) -> Result<Self> {
        while parents.last().is_some_and(Vec::is_empty) {
            parents.pop();
        }
        let mut above = 1;
        for (n, level) in parents.iter().enumerate() {
            if let Some(&p) = level.iter().find(|&&p| p >= above) {
                return Err(Error::MalformedCovering(format!("node at level {} has missing parent {p}", n + 1)));
            }
            above = level.len();
        }
        Ok(Tree { parents })
    }

    pub fn trivial() -> Self {
        Tree { parents: Vec::new() }
    }

    pub fn depth(&self) -> usize {
        self.parents.len()
    }

    pub fn level_size(&self, n: usize) -> usize {
        if n == 0 {
            1
        } else {
            self.parents.get(n - 1).map_or(0, Vec::len)
        }
    }

    pub fn parent(&self, n: usize, a: usize) -> usize {
        self.parents[n - 1][a]
    }

    pub fn parents(&self) -> &[Vec<usize>] {
        &self.parents
    }

    pub fn children(&self, n: usize, a: usize) -> Vec<usize> {
        self.parents.get(n).map_or_else(Vec::new, |level| (0..level.len()).filter(|&b| level[b] == a).collect())
    }

    pub fn is_leaf(&self, n: usize, a: usize) -> bool {
        self.parents.get(n).map_or(true, |level| !level.contains(&a))
    }

    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..=self.depth()).flat_map(move |n| (0..self.level_size(n)).map(move |a| (n, a)))
    }

    pub fn leaves(&self) -> Vec<(usize, usize)> {
        self.nodes().filter(|&(n, a)| self.is_leaf(n, a)).collect()
    }
}

/// What a multi-covering needs from its ambient category.
pub trait CoveringNotion {
    type Obj: Clone + PartialEq + Debug;
    type Mor: Clone + PartialEq + Debug;
    fn dom(&self, f: &Self::Mor) -> Self::Obj;
    fn cod(&self, f: &Self::Mor) -> Self::Obj;
    /// `g ∘ f`.
    fn compose(&self, g: &Self::Mor, f: &Self::Mor) -> Self::Mor;
    fn identity(&self, x: &Self::Obj) -> Self::Mor;
    fn is_covering_family(&self, at: &Self::Obj, family: &[Self::Mor]) -> bool;
    fn show_obj(&self, x: &Self::Obj) -> String;
}

impl CoveringNotion for StableNotion {
    type Obj = ObjId;
    type Mor = MorId;
    fn dom(&self, f: &MorId) -> ObjId {
        self.base().dom(*f)
    }
    fn cod(&self, f: &MorId) -> ObjId {
        self.base().cod(*f)
    }
    fn compose(&self, g: &MorId, f: &MorId) -> MorId {
        self.base().compose(*g, *f)
    }
    fn identity(&self, x: &ObjId) -> MorId {
        self.base().id(*x)
    }
    fn is_covering_family(&self, at: &ObjId, family: &[MorId]) -> bool {
        match Presieve::new(self.base(), *at, family.iter().copied()) {
            Ok(p) => self.is_stable_covering(&p.generate(self.base())),
            Err(_) => false,
        }
    }
    fn show_obj(&self, x: &ObjId) -> String {
        self.base().object_name(*x).into()
    }
}

/// A tree labelled by objects, with one morphism from each node to its parent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiCovering<O, M> {
    tree: Tree,
    objects: Vec<Vec<O>>,
    morphisms: Vec<Vec<M>>,
}

impl<O: Clone + PartialEq, M: Clone> MultiCovering<O, M> {
    pub fn new(tree: Tree, objects: Vec<Vec<O>>, morphisms: Vec<Vec<M>>) -> Result<Self> {
        let shape_ok = objects.len() == tree.depth() + 1
            && morphisms.len() == tree.depth()
            && (0..=tree.depth()).all(|n| objects[n].len() == tree.level_size(n))
            && (1..=tree.depth()).all(|n| morphisms[n - 1].len() == tree.level_size(n));
        if !shape_ok {
            return Err(Error::MalformedCovering("node tables do not match the tree".into()));
        }
        Ok(MultiCovering { tree, objects, morphisms })
    }

    /// The depth-0 covering of `root`.
    pub fn trivial(root: O) -> Self {
        MultiCovering { tree: Tree::trivial(), objects: vec![vec![root]], morphisms: Vec::new() }
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn root(&self) -> &O {
        &self.objects[0][0]
    }

    pub fn object(&self, n: usize, a: usize) -> &O {
        &self.objects[n][a]
    }

    /// The morphism from node `(n, a)` to its parent; `n ≥ 1`.
    pub fn morphism(&self, n: usize, a: usize) -> &M {
        &self.morphisms[n - 1][a]
    }

    pub fn objects(&self) -> &[Vec<O>] {
        &self.objects
    }

    pub fn morphisms(&self) -> &[Vec<M>] {
        &self.morphisms
    }

    /// Composite of the morphisms from `(n, a)` down to the root.
    pub fn branch<N: CoveringNotion<Obj = O, Mor = M>>(&self, j: &N, n: usize, a: usize) -> M {
        let mut composite = j.identity(self.object(n, a));
        let (mut level, mut node) = (n, a);
        while level > 0 {
            composite = j.compose(self.morphism(level, node), &composite);
            node = self.tree.parent(level, node);
            level -= 1;
        }
        composite
    }

    /// Morphisms from the children of `(n, a)`.
    pub fn child_family(&self, n: usize, a: usize) -> Vec<M> {
        self.tree.children(n, a).into_iter().map(|b| self.morphism(n + 1, b).clone()).collect()
    }
}

/// Checks that morphisms connect the right objects and every node with
/// children carries a covering family.
pub fn validate_multicovering<N: CoveringNotion>(j: &N, mc: &MultiCovering<N::Obj, N::Mor>) -> Vec<String> {
    let mut report = Vec::new();
    let t = mc.tree();
    for (n, a) in t.nodes().filter(|&(n, _)| n > 0) {
        let m = mc.morphism(n, a);
        let parent = mc.object(n - 1, t.parent(n, a));
        if j.dom(m) != *mc.object(n, a) || j.cod(m) != *parent {
            report.push(format!("node ({n},{a}): morphism does not connect the node to its parent"));
        }
    }
    if !report.is_empty() {
        return report;
    }
    for (n, a) in t.nodes() {
        if !t.is_leaf(n, a) && !j.is_covering_family(mc.object(n, a), &mc.child_family(n, a)) {
            report.push(format!(
                "node ({n},{a}) at `{}`: child family is not covering",
                j.show_obj(mc.object(n, a))
            ));
        }
    }
    report
}

/// Grafts one covering per level-1 node onto a covering of depth at most 1.
pub fn compose_multicoverings<O: Clone + PartialEq + Debug, M: Clone>(
    root: &MultiCovering<O, M>,
    subtrees: &[MultiCovering<O, M>],
) -> Result<MultiCovering<O, M>> {
    match root.tree.depth() {
        0 => {
            if subtrees.len() != 1 || subtrees[0].root() != root.root() {
                return Err(Error::MalformedCovering("a depth-0 covering takes one subtree at its root".into()));
            }
            return Ok(subtrees[0].clone());
        }
        1 => {}
        _ => return Err(Error::MalformedCovering("the grafting base must have depth at most 1".into())),
    }
    let width = root.tree.level_size(1);
    if subtrees.len() != width {
        return Err(Error::MalformedCovering(format!("expected {width} subtrees, got {}", subtrees.len())));
    }
    for (i, sub) in subtrees.iter().enumerate() {
        if sub.root() != root.object(1, i) {
            return Err(Error::MalformedCovering(format!("subtree {i} is rooted at {:?}, expected {:?}", sub.root(), root.object(1, i))));
        }
    }
    let depth = 1 + subtrees.iter().map(|s| s.tree.depth()).max().unwrap_or(0);
    let mut parents = vec![root.tree.parents[0].clone()];
    let mut objects = vec![root.objects[0].clone(), root.objects[1].clone()];
    let mut morphisms = vec![root.morphisms[0].clone()];
    for n in 2..=depth {
        let (mut ps, mut os, mut ms) = (Vec::new(), Vec::new(), Vec::new());
        let mut offset = 0;
        for sub in subtrees {
            let k = n - 1;
            if k <= sub.tree.depth() {
                ps.extend(sub.tree.parents[k - 1].iter().map(|p| p + offset));
                os.extend(sub.objects[k].iter().cloned());
                ms.extend(sub.morphisms[k - 1].iter().cloned());
            }
            offset += sub.tree.level_size(k - 1);
        }
        parents.push(ps);
        objects.push(os);
        morphisms.push(ms);
    }
    MultiCovering::new(Tree::new(parents)?, objects, morphisms)
}

/// Level-preserving map of trees with the vertical morphisms of the squares.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeMorphism {
    /// `maps[n][a]`: image at level `n` of node `(n, a)`.
    pub maps: Vec<Vec<usize>>,
    /// `squares[n][a]`: morphism from the node's object to its image's object.
    pub squares: Vec<Vec<MorId>>,
}

/// Pulls a multi-covering of `X` back along `f : X′ → X`, level by level.
pub fn pullback_multicovering(
    j: &StableNotion,
    mc: &MultiCovering<ObjId, MorId>,
    f: MorId,
) -> Result<(MultiCovering<ObjId, MorId>, TreeMorphism)> {
    let c = j.base().clone();
    if c.cod(f) != *mc.root() {
        return Err(Error::CodomainMismatch {
            morphism: c.morphism_name(f).into(),
            expected: c.object_name(*mc.root()).into(),
            found: c.object_name(c.cod(f)).into(),
        });
    }
    let mut parents: Vec<Vec<usize>> = Vec::new();
    let mut objects = vec![vec![c.dom(f)]];
    let mut morphisms: Vec<Vec<MorId>> = Vec::new();
    let mut maps = vec![vec![0]];
    let mut squares = vec![vec![f]];
    for n in 0..mc.tree().depth() {
        let (mut ps, mut os, mut ms, mut mp, mut sq) = (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for a in 0..objects[n].len() {
            let (old, h) = (maps[n][a], squares[n][a]);
            let old_children = mc.tree().children(n, old);
            if old_children.is_empty() {
                continue;
            }
            if c.is_identity(h) {
                for b in old_children {
                    ps.push(a);
                    os.push(*mc.object(n + 1, b));
                    ms.push(*mc.morphism(n + 1, b));
                    mp.push(b);
                    sq.push(c.id(*mc.object(n + 1, b)));
                }
                continue;
            }
            let family: Vec<MorId> = old_children.iter().map(|&b| *mc.morphism(n + 1, b)).collect();
            let pulled = Presieve::new(&c, *mc.object(n, old), family)?.generate(&c).pullback_unchecked(&c, h);
            if !j.is_stable_covering(&pulled) {
                return Err(Error::NotStable(c.object_name(objects[n][a]).into()));
            }
            for y in pulled.generators(&c) {
                let target = c.compose(h, y);
                let (b, z) = old_children
                    .iter()
                    .find_map(|&b| {
                        let x = *mc.morphism(n + 1, b);
                        c.hom(c.dom(y), c.dom(x)).find(|&z| c.compose(x, z) == target).map(|z| (b, z))
                    })
                    .expect("member of a pulled back sieve factors through the family");
                ps.push(a);
                os.push(c.dom(y));
                ms.push(y);
                mp.push(b);
                sq.push(z);
            }
        }
        if ps.is_empty() {
            break;
        }
        parents.push(ps);
        objects.push(os);
        morphisms.push(ms);
        maps.push(mp);
        squares.push(sq);
    }
    let covering = MultiCovering::new(Tree::new(parents)?, objects, morphisms)?;
    Ok((covering, TreeMorphism { maps, squares }))
}

/// Why a leaf of a certificate needs no further covering.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LeafReason {
    /// The branch composite factors through this presieve member.
    Member { member: MorId },
    /// The branch composite restricts the section to this chosen element.
    Chosen { element: usize },
    /// The empty family covers the leaf object.
    EmptyFamily,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafWitness {
    pub level: usize,
    pub index: usize,
    pub reason: LeafReason,
}

/// A multi-covering whose leaves all carry a reason.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub covering: MultiCovering<ObjId, MorId>,
    pub leaves: Vec<LeafWitness>,
}

impl Certificate {
    pub fn depth(&self) -> usize {
        self.covering.tree().depth()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeOutcome {
    Covered(Certificate),
    NotCovered,
    /// A certificate exists, but only with more levels than allowed.
    BoundExhausted { required_depth: usize },
}

impl TreeOutcome {
    pub fn is_covered(&self) -> bool {
        matches!(self, TreeOutcome::Covered(_))
    }
}

/// Breadth-first coverage search over states `(object, S)`.
///
/// A state is a leaf when `is_leaf` holds or the empty family covers its
/// object; otherwise its candidate families are the basic covers of `j`,
/// each child getting the state `restrict(S, d)`.
pub(crate) fn state_search<S: Clone + Eq + Hash>(
    j: &StableNotion,
    root: ObjId,
    root_state: S,
    is_leaf: impl Fn(ObjId, &S) -> bool,
    restrict: impl Fn(&S, MorId) -> S,
    reason: impl Fn(ObjId, &S, MorId) -> LeafReason,
    depth_bound: usize,
) -> TreeOutcome {
    let c = j.base().clone();
    let empty_covers: Vec<bool> = c.object_ids().map(|x| j.is_stable_covering(&Sieve::empty(&c, x))).collect();
    let mut states: Vec<(ObjId, S)> = vec![(root, root_state.clone())];
    let mut index: HashMap<(ObjId, S), usize> = HashMap::from([((root, root_state), 0)]);
    let mut leaf = Vec::new();
    let mut families: Vec<Vec<Vec<(MorId, usize)>>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (y, s) = states[i].clone();
        let is_l = empty_covers[y.0] || is_leaf(y, &s);
        let mut fams = Vec::new();
        if !is_l {
            for d in j.basic_covers(y) {
                let mut children = Vec::new();
                for g in d.generators(&c) {
                    let key = (c.dom(g), restrict(&s, g));
                    let k = *index.entry(key.clone()).or_insert_with(|| {
                        states.push(key);
                        queue.push_back(states.len() - 1);
                        states.len() - 1
                    });
                    children.push((g, k));
                }
                fams.push(children);
            }
        }
        if leaf.len() <= i {
            leaf.resize(i + 1, false);
            families.resize(i + 1, Vec::new());
        }
        leaf[i] = is_l;
        families[i] = fams;
    }

    let mut level: Vec<Option<usize>> = leaf.iter().map(|&l| l.then_some(0)).collect();
    loop {
        let mut changed = false;
        for i in 0..states.len() {
            for fam in &families[i] {
                let worst = fam.iter().try_fold(0, |acc, &(_, k)| level[k].map(|l| acc.max(l)));
                if let Some(w) = worst {
                    if level[i].map_or(true, |l| w + 1 < l) {
                        level[i] = Some(w + 1);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let Some(needed) = level[0] else { return TreeOutcome::NotCovered };
    if needed > depth_bound {
        return TreeOutcome::BoundExhausted { required_depth: needed };
    }

    // nodes per level: (state, branch composite)
    let mut nodes: Vec<Vec<(usize, MorId)>> = vec![vec![(0, c.id(root))]];
    let mut parents: Vec<Vec<usize>> = Vec::new();
    let mut morphisms: Vec<Vec<MorId>> = Vec::new();
    let mut leaves = Vec::new();
    for n in 0..=needed {
        let (mut ps, mut ns, mut ms) = (Vec::new(), Vec::new(), Vec::new());
        for (a, &(i, branch)) in nodes[n].iter().enumerate() {
            let l = level[i].expect("certificate nodes are covered");
            if l == 0 {
                let (y, s) = &states[i];
                let why = if is_leaf(*y, s) { reason(*y, s, branch) } else { LeafReason::EmptyFamily };
                leaves.push(LeafWitness { level: n, index: a, reason: why });
                continue;
            }
            let fam = families[i]
                .iter()
                .find(|fam| fam.iter().all(|&(_, k)| level[k].is_some_and(|lk| lk < l)))
                .expect("a covered state has a witnessing family");
            for &(g, k) in fam {
                ps.push(a);
                ns.push((k, c.compose(branch, g)));
                ms.push(g);
            }
        }
        if ns.is_empty() {
            break;
        }
        parents.push(ps);
        morphisms.push(ms);
        nodes.push(ns);
    }
    let objects = nodes.iter().map(|level| level.iter().map(|&(i, _)| states[i].0).collect()).collect();
    let covering = MultiCovering::new(Tree::new(parents).expect("built level by level"), objects, morphisms)
        .expect("tables built together");
    TreeOutcome::Covered(Certificate { covering, leaves })
}

/// Searches for a multi-covering whose every leaf either factors through
/// a member of `s` or is covered by the empty family.
pub fn tree_covers(j: &StableNotion, s: &impl SieveLike, depth_bound: usize) -> TreeOutcome {
    let c = j.base().clone();
    let presieve = s.as_presieve();
    let sieve = s.to_sieve(&c);
    state_search(
        j,
        sieve.at(),
        sieve.clone(),
        |_, state: &Sieve| state.is_maximal(&c),
        |state, g| state.pullback_unchecked(&c, g),
        |_, _, branch| LeafReason::Member {
            member: presieve.factoring_member(&c, branch).expect("branch composite lies in the generated sieve"),
        },
        depth_bound,
    )
}

/// Re-checks a coverage certificate for `target` against `j`.
pub fn validate_certificate(j: &StableNotion, target: &Presieve, cert: &Certificate) -> Vec<String> {
    let c = j.base();
    let mut report = validate_multicovering(j, &cert.covering);
    if *cert.covering.root() != target.at() {
        report.push("certificate root differs from the presieve target".into());
    }
    if !report.is_empty() {
        return report;
    }
    let t = cert.covering.tree();
    for (n, a) in t.leaves() {
        let Some(w) = cert.leaves.iter().find(|w| w.level == n && w.index == a) else {
            report.push(format!("leaf ({n},{a}) has no witness"));
            continue;
        };
        let ok = match w.reason {
            LeafReason::Member { member } => {
                target.members().contains(&member) && c.factors_through(cert.covering.branch(j, n, a), member)
            }
            LeafReason::EmptyFamily => j.is_stable_covering(&Sieve::empty(c, *cert.covering.object(n, a))),
            LeafReason::Chosen { .. } => false,
        };
        if !ok {
            report.push(format!("leaf ({n},{a}): witness does not hold"));
        }
    }
    for w in &cert.leaves {
        if w.level > t.depth() || w.index >= t.level_size(w.level) || !t.is_leaf(w.level, w.index) {
            report.push(format!("witness for ({},{}) does not name a leaf", w.level, w.index));
        }
    }
    report
}
