//! Independent oracles for generated topologies: exhaustive enumeration of
//! all topologies, and saturation under the three axioms.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::category::FiniteCategory;
use crate::error::{Error, Result};
use crate::sieve::{all_sieves, Sieve};

use super::{check_sieve, Topology};

/// Default bound on the total sieve count for exhaustive enumeration.
pub const DEFAULT_GUARD: usize = 24;

/// Every topology on a small category, as bitmasks over its sieves.
#[derive(Clone, Debug)]
pub struct TopologySpace {
    base: Arc<FiniteCategory>,
    sieves: Vec<Sieve>,
    index: HashMap<Sieve, usize>,
    masks: Vec<u64>,
}

fn bit(i: usize) -> u64 {
    1u64 << i
}

impl TopologySpace {
    pub fn new(base: Arc<FiniteCategory>, guard: usize) -> Result<Self> {
        let c = &*base;
        let per_object: Vec<Vec<Sieve>> = c.object_ids().map(|x| all_sieves(c, x)).collect();
        let n: usize = per_object.iter().map(Vec::len).sum();
        if n > guard.min(64) {
            return Err(Error::GuardExceeded { what: "sieve count", needed: n, bound: guard.min(64) });
        }
        let sieves: Vec<Sieve> = per_object.into_iter().flatten().collect();
        let index: HashMap<Sieve, usize> = sieves.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let pull = |s: &Sieve, f| index[&s.pullback_unchecked(c, f)];

        let mut maximal = 0u64;
        let mut stab = vec![0u64; n];
        for (i, s) in sieves.iter().enumerate() {
            if s.is_maximal(c) {
                maximal |= bit(i);
            }
            for &f in c.hom_into(s.at()) {
                stab[i] |= bit(pull(s, f));
            }
        }
        // (sieve, witness, pullbacks of the sieve along the witness) per object
        let mut local: Vec<(usize, usize, u64)> = Vec::new();
        for (i, s) in sieves.iter().enumerate() {
            for (j, w) in sieves.iter().enumerate() {
                if i != j && s.at() == w.at() {
                    let m = w.members().fold(0u64, |m, f| m | bit(pull(s, f)));
                    local.push((i, j, m));
                }
            }
        }

        let all = if n == 64 { u64::MAX } else { bit(n) - 1 };
        let free = all & !maximal;
        let mut masks = Vec::new();
        let mut sub = 0u64;
        loop {
            let m = maximal | sub;
            let stable = (0..n).filter(|&i| m & bit(i) != 0).all(|i| stab[i] & !m == 0);
            if stable && local.iter().all(|&(i, j, need)| m & bit(j) == 0 || m & bit(i) != 0 || need & !m != 0) {
                masks.push(m);
            }
            if sub == free {
                break;
            }
            sub = sub.wrapping_sub(free) & free;
        }
        Ok(TopologySpace { base, sieves, index, masks })
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn sieve_count(&self) -> usize {
        self.sieves.len()
    }

    fn topology(&self, mask: u64) -> Topology {
        let mut sets = vec![BTreeSet::new(); self.base.object_count()];
        for (i, s) in self.sieves.iter().enumerate() {
            if mask & bit(i) != 0 {
                sets[s.at().0].insert(s.clone());
            }
        }
        Topology::from_sets(self.base.clone(), sets)
    }

    pub fn topologies(&self) -> Vec<Topology> {
        self.masks.iter().map(|&m| self.topology(m)).collect()
    }

    /// Intersection of every topology containing the generators.
    pub fn generated(&self, gens: &[Sieve]) -> Result<Topology> {
        let mut required = 0u64;
        for g in gens {
            check_sieve(&self.base, g)?;
            required |= bit(self.index[g]);
        }
        let mask = self.masks.iter().filter(|&&m| m & required == required).fold(u64::MAX, |acc, &m| acc & m);
        Ok(self.topology(mask))
    }
}

/// All topologies on `c`, when its sieve count is within `guard`.
pub fn all_topologies(c: &Arc<FiniteCategory>, guard: usize) -> Result<Vec<Topology>> {
    Ok(TopologySpace::new(c.clone(), guard)?.topologies())
}

/// The intersection of every topology containing `gens`, by exhaustive
/// enumeration of candidate covering systems.
pub fn brute_force_generated(c: &Arc<FiniteCategory>, gens: &[Sieve], guard: usize) -> Result<Topology> {
    TopologySpace::new(c.clone(), guard)?.generated(gens)
}

/// The least covering system containing `gens` and closed under the three
/// axioms, reached by applying them until nothing changes. Needs no guard.
pub fn saturate_generated(c: &Arc<FiniteCategory>, gens: &[Sieve]) -> Result<Topology> {
    let mut sets: Vec<BTreeSet<Sieve>> = c.object_ids().map(|x| BTreeSet::from([Sieve::maximal(c, x)])).collect();
    for g in gens {
        check_sieve(c, g)?;
        sets[g.at().0].insert(g.clone());
    }
    let per_object: Vec<Vec<Sieve>> = c.object_ids().map(|x| all_sieves(c, x)).collect();
    loop {
        let mut added = Vec::new();
        for s in sets.iter().flatten() {
            for &f in c.hom_into(s.at()) {
                let p = s.pullback_unchecked(c, f);
                if !sets[p.at().0].contains(&p) {
                    added.push(p);
                }
            }
        }
        for x in c.object_ids() {
            for s in &per_object[x.0] {
                if sets[x.0].contains(s) {
                    continue;
                }
                let local = sets[x.0].iter().any(|w| {
                    w.members().all(|f| {
                        let p = s.pullback_unchecked(c, f);
                        sets[p.at().0].contains(&p)
                    })
                });
                if local {
                    added.push(s.clone());
                }
            }
        }
        if added.is_empty() {
            return Ok(Topology::from_sets(c.clone(), sets));
        }
        for s in added {
            sets[s.at().0].insert(s);
        }
    }
}
