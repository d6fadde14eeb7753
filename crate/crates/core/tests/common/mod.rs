//! Shared fixtures: a seeded random corpus of small home-space instances
//! and exhaustive helpers used as ground truth.

#![allow(dead_code)]

use pnhs::net::reachable_set_bounded;
use pnhs::{Configuration, LinearSet, PetriNet, SemilinearSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CORPUS_SEED: u64 = 0x5eed_2024;
pub const CORPUS_SIZE: usize = 200;
pub const BRUTE_NODES: usize = 20_000;

#[derive(Debug, Clone)]
pub struct Instance {
    pub id: usize,
    pub net: PetriNet,
    pub x: Vec<Configuration>,
    pub h: SemilinearSet,
}

impl Instance {
    pub fn x_set(&self) -> SemilinearSet {
        SemilinearSet::from_points(self.net.dim(), self.x.iter().map(|c| c.as_slice().to_vec())).unwrap()
    }
}

fn vector(rng: &mut ChaCha8Rng, d: usize, max: u64) -> Vec<u64> {
    (0..d).map(|_| rng.gen_range(0..=max)).collect()
}

pub fn random_net(rng: &mut ChaCha8Rng, d: usize, max_actions: usize, max_entry: u64) -> PetriNet {
    let n = rng.gen_range(1..=max_actions);
    let pairs = (0..n).map(|_| (vector(rng, d, max_entry), vector(rng, d, max_entry))).collect();
    PetriNet::from_pairs(d, pairs).unwrap()
}

/// `d ≤ 3`, at most 4 actions with entries ≤ 2, `X` at most two points
/// with coordinates ≤ 2, `H` at most two linear components with
/// coordinates ≤ 2 and at most one period each.
pub fn corpus() -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    (0..CORPUS_SIZE)
        .map(|id| {
            let d = rng.gen_range(1..=3);
            let net = random_net(&mut rng, d, 4, 2);
            let nx = rng.gen_range(1..=2);
            let mut x: Vec<Configuration> = (0..nx).map(|_| Configuration::new(vector(&mut rng, d, 2))).collect();
            x.sort();
            x.dedup();
            let nh = rng.gen_range(1..=2);
            let comps = (0..nh)
                .map(|_| {
                    let base = vector(&mut rng, d, 2);
                    let periods = if rng.gen_bool(0.5) { vec![vector(&mut rng, d, 2)] } else { Vec::new() };
                    LinearSet::new(base, periods).unwrap()
                })
                .collect();
            let h = SemilinearSet::from_components(d, comps).unwrap();
            Instance { id, net, x, h }
        })
        .collect()
}

/// Complete reachability set from `c`, or `None` past the budget.
pub fn post_star(net: &PetriNet, c: &[u64], budget: usize) -> Option<Vec<Configuration>> {
    let e = reachable_set_bounded(net, &Configuration::from(c), budget);
    e.complete.then_some(e.configs)
}

/// Does `c` reach a member of `s`? `None` when the exploration is cut.
pub fn reaches(net: &PetriNet, c: &[u64], s: &SemilinearSet, budget: usize) -> Option<bool> {
    post_star(net, c, budget).map(|r| r.iter().any(|x| s.member(x).unwrap()))
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in permutations(n - 1) {
            let mut p = vec![first];
            p.extend(rest.into_iter().map(|r| if r >= first { r + 1 } else { r }));
            out.push(p);
        }
    }
    out
}
