#![allow(dead_code)]

use std::sync::Arc;

use grotto::geolog::Signature;
use grotto::presheaf::{all_presheaves, Presheaf};
use grotto::sieve::all_sieves;
use grotto::{FiniteCategory, Presieve, Sieve};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn every_sieve(c: &FiniteCategory) -> Vec<Sieve> {
    c.object_ids().flat_map(|x| all_sieves(c, x)).collect()
}

/// Sieve generated by a random subset of the arrows into a random object.
pub fn random_sieve(c: &FiniteCategory, rng: &mut impl Rng) -> Sieve {
    let xs: Vec<_> = c.object_ids().collect();
    let x = *xs.choose(rng).unwrap();
    let members: Vec<_> = c.hom_into(x).iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
    Presieve::new(c, x, members).unwrap().generate(c)
}

pub fn random_family(c: &FiniteCategory, rng: &mut impl Rng, max: usize) -> Vec<Sieve> {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| random_sieve(c, rng)).collect()
}

/// Subfamilies of `pool` indexed by the bits of `mask`.
pub fn subfamily(pool: &[Sieve], mask: u32) -> Vec<Sieve> {
    pool.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, s)| s.clone()).collect()
}

/// Every presheaf with at most `max` elements per object.
pub fn small_presheaves(c: &Arc<FiniteCategory>, max: usize) -> Vec<Presheaf> {
    let n = c.object_count();
    let mut sizes = vec![vec![]];
    for _ in 0..n {
        sizes = sizes.into_iter().flat_map(|v: Vec<usize>| (0..=max).map(move |k| [v.clone(), vec![k]].concat())).collect();
    }
    sizes.iter().flat_map(|s| all_presheaves(c, s).unwrap()).collect()
}

pub fn random_presheaf(c: &Arc<FiniteCategory>, rng: &mut impl Rng, max: usize) -> Presheaf {
    loop {
        let sizes: Vec<usize> = c.object_ids().map(|_| rng.gen_range(0..=max)).collect();
        if let Some(p) = all_presheaves(c, &sizes).unwrap().choose(rng) {
            return p.clone();
        }
    }
}

/// Sort names, relation symbols with arities, and variable pools per sort.
pub struct Vocabulary {
    pub signature: Signature,
    pub vars: Vec<Vec<&'static str>>,
}

const POOLS: [[&str; 3]; 2] = [["x", "y", "z"], ["u", "v", "w"]];

/// Small random relational signature: one or two sorts, one or two
/// relations of arity one or two, at most twelve relation cells when every
/// carrier has three elements.
pub fn random_vocabulary(rng: &mut impl Rng) -> Vocabulary {
    loop {
        let sorts = rng.gen_range(1..=2);
        let names = ["A", "B"];
        let mut sig = Signature::new(&names[..sorts]).unwrap();
        let mut cells = 0;
        for (k, r) in ["R", "P"].iter().enumerate().take(rng.gen_range(1..=2)) {
            let arity_len = if k == 0 { 2 } else { rng.gen_range(1..=2) };
            let arity: Vec<&str> = (0..arity_len).map(|_| names[rng.gen_range(0..sorts)]).collect();
            cells += 3usize.pow(arity_len as u32);
            sig.add_relation(r, &arity).unwrap();
        }
        if cells <= 12 {
            let vars = (0..sorts).map(|s| POOLS[s].to_vec()).collect();
            return Vocabulary { signature: sig, vars };
        }
    }
}

impl Vocabulary {
    pub fn atom(&self, rng: &mut impl Rng) -> String {
        let sig = &self.signature;
        let r = &sig.relations()[rng.gen_range(0..sig.relations().len())];
        let args: Vec<&str> = r.arity.iter().map(|&s| *self.vars[s].choose(rng).unwrap()).collect();
        format!("{}({})", r.name, args.join(","))
    }

    pub fn horn(&self, rng: &mut impl Rng, atoms: usize) -> String {
        let n = rng.gen_range(1..=atoms);
        (0..n).map(|_| self.atom(rng)).collect::<Vec<_>>().join(" ∧ ")
    }

    /// A Horn body, sometimes under an existential, sometimes one of two
    /// disjuncts, sometimes `⊥`.
    pub fn geometric(&self, rng: &mut impl Rng) -> String {
        match rng.gen_range(0..8) {
            0 => "⊥".into(),
            1 | 2 => {
                let s = rng.gen_range(0..self.vars.len());
                let v = if s == 0 { "e" } else { "f" };
                let body = self.horn(rng, 2).replace(self.vars[s][2], v);
                format!("∃{v}:{}. {body}", self.signature.sort_name(s))
            }
            3 => format!("{} ∨ {}", self.horn(rng, 1), self.horn(rng, 2)),
            _ => self.horn(rng, 2),
        }
    }
}
