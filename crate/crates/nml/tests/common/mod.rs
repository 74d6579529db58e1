//! Seeded generators shared by the integration suites. Everything is
//! driven by a caller-supplied ChaCha stream so failures replay exactly.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nml::birel::{BrFrame, BrModel};
use nml::{Formula, NFrame, NModel, Semantics, WorldSet};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Up-sets of a random preorder: reflexive seeds, a few random edges, then
/// transitive closure. `up[w]` is {v : w ≤ v}.
pub fn random_preorder(rng: &mut impl Rng, n: usize, extra_edges: usize) -> Vec<WorldSet> {
    let mut up: Vec<WorldSet> = (0..n).map(WorldSet::singleton).collect();
    for _ in 0..extra_edges {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        up[a].insert(b);
    }
    closure(&mut up, |up, w| {
        let mut grown = up[w];
        for v in up[w].iter() {
            grown = grown.union(up[v]);
        }
        grown
    });
    up
}

/// Grow `sets[w]` by `step` until nothing changes. `step` must be monotone.
fn closure(sets: &mut Vec<WorldSet>, step: impl Fn(&[WorldSet], usize) -> WorldSet) {
    loop {
        let mut changed = false;
        for w in 0..sets.len() {
            let grown = step(sets, w);
            if grown != sets[w] {
                sets[w] = grown;
                changed = true;
            }
        }
        if !changed {
            return;
        }
    }
}

fn hereditary_valuation(
    rng: &mut impl Rng,
    min: &[WorldSet],
    vars: &[&str],
) -> BTreeMap<String, WorldSet> {
    let n = min.len();
    let mut valuation = BTreeMap::new();
    for var in vars {
        let mut v = WorldSet::EMPTY;
        for w in 0..n {
            if rng.random_bool(0.4) {
                v.insert(w);
            }
        }
        let mut sets = vec![v];
        closure(&mut sets, |sets, _| {
            let mut grown = sets[0];
            for w in sets[0].iter() {
                grown = grown.union(min[w]);
            }
            grown
        });
        valuation.insert(var.to_string(), sets[0]);
    }
    valuation
}

fn world_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("w{i}")).collect()
}

/// A random intuitionistic model whose frame satisfies the base, arrow and
/// Δ conditions by construction: min is a preorder's up-sets, and max is
/// grown from min ∪ noise until Δ-condition closure.
pub fn random_iml1_model(rng: &mut impl Rng, n: usize, vars: &[&str]) -> NModel {
    let min = random_preorder(rng, n, n);
    let mut max: Vec<WorldSet> = min
        .iter()
        .map(|&m| {
            let mut s = m;
            for w in 0..n {
                if rng.random_bool(0.3) {
                    s.insert(w);
                }
            }
            s
        })
        .collect();
    let min_copy = min.clone();
    closure(&mut max, |max, w| {
        let mut grown = max[w];
        for u in min_copy[w].iter() {
            grown = grown.union(max[u]);
        }
        grown
    });
    let frame = NFrame::new(world_names(n), min, max).expect("construction meets the invariants");
    let valuation = hereditary_valuation(rng, &(0..n).map(|w| frame.min(w)).collect::<Vec<_>>(), vars);
    NModel::new(frame, valuation, Semantics::Intuitionistic).expect("valuation closed under min")
}

/// A random bi-relational model: ≤ is a random preorder, R starts at ≤
/// plus noise and is closed under the mix law (w ≤ v and v R u give w R u).
pub fn random_br_model(rng: &mut impl Rng, n: usize, vars: &[&str]) -> BrModel {
    let leq = random_preorder(rng, n, n);
    let mut r = leq.clone();
    for _ in 0..n {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        r[a].insert(b);
    }
    let leq_copy = leq.clone();
    closure(&mut r, |r, w| {
        let mut grown = r[w];
        for v in leq_copy[w].iter() {
            grown = grown.union(r[v]);
        }
        grown
    });
    let valuation = hereditary_valuation(rng, &leq, vars);
    let frame = BrFrame::new(world_names(n), leq, r).expect("construction meets the invariants");
    BrModel::new(frame, valuation).expect("laws hold by closure")
}

fn random_leaf<R: Rng>(rng: &mut R, vars: &[&str]) -> Formula {
    if rng.random_range(0..4) == 0 {
        Formula::Bot
    } else {
        Formula::atom(vars[rng.random_range(0..vars.len())])
    }
}

/// A random formula of at most `size` nodes over {atom, ⊥, ∧, ∨, →, Δ}.
pub fn random_delta_formula<R: Rng>(rng: &mut R, vars: &[&str], size: usize) -> Formula {
    if size <= 1 {
        return random_leaf(rng, vars);
    }
    match rng.random_range(0..5) {
        0 => Formula::delta(random_delta_formula(rng, vars, size - 1)),
        k if size >= 3 => {
            let left = rng.random_range(1..=size - 2);
            let l = random_delta_formula(rng, vars, left);
            let r = random_delta_formula(rng, vars, size - 1 - left);
            match k {
                1 => Formula::and(l, r),
                2 => Formula::or(l, r),
                _ => Formula::imp(l, r),
            }
        }
        _ => random_leaf(rng, vars),
    }
}
