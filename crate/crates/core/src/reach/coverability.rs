//! Karp–Miller coverability tree.

use std::collections::{HashSet, VecDeque};
use std::time::Instant;

use crate::net::PetriNet;

/// Sentinel for an unbounded (`ω`) place.
pub const OMEGA: u64 = u64::MAX;

/// Explored part of a Karp–Miller tree.
#[derive(Debug, Clone)]
pub struct KarpMiller {
    /// Markings of the tree nodes, possibly containing [`OMEGA`].
    pub markings: Vec<Vec<u64>>,
    /// The tree was fully built within the budget.
    pub complete: bool,
}

impl KarpMiller {
    /// Some reachable configuration dominates `target`. Only meaningful
    /// as a refutation when the tree is complete.
    pub fn covers(&self, target: &[u64]) -> bool {
        self.markings
            .iter()
            .any(|m| m.iter().zip(target).all(|(a, b)| a >= b))
    }

    /// No `ω` was introduced, so the reachability set is finite and equal
    /// to the set of node markings.
    pub fn bounded(&self) -> bool {
        self.markings.iter().all(|m| !m.contains(&OMEGA))
    }

    /// Actions whose precondition is coverable; every other action is dead.
    pub fn live_actions(&self, net: &PetriNet) -> Vec<bool> {
        net.actions().iter().map(|a| self.covers(&a.pre)).collect()
    }
}

fn fire_omega(m: &[u64], pre: &[u64], post: &[u64]) -> Option<Vec<u64>> {
    m.iter()
        .zip(pre)
        .zip(post)
        .map(|((&x, &p), &q)| {
            if x == OMEGA {
                Some(OMEGA)
            } else if x < p {
                None
            } else {
                (x - p).checked_add(q).filter(|&v| v != OMEGA)
            }
        })
        .collect()
}

/// Builds the tree breadth-first, firing actions in declaration order and
/// accelerating against every strictly smaller ancestor.
pub fn karp_miller(net: &PetriNet, initial: &[u64], node_budget: usize, deadline: Option<Instant>) -> KarpMiller {
    let mut markings: Vec<Vec<u64>> = vec![initial.to_vec()];
    let mut parent: Vec<Option<usize>> = vec![None];
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    seen.insert(initial.to_vec());
    let mut queue = VecDeque::from([0usize]);
    let mut complete = true;
    'outer: while let Some(node) = queue.pop_front() {
        if deadline.is_some_and(|d| markings.len() % 256 == 0 && Instant::now() >= d) {
            complete = false;
            break;
        }
        for a in net.actions() {
            let Some(mut next) = fire_omega(&markings[node], &a.pre, &a.post) else {
                continue;
            };
            let mut anc = Some(node);
            while let Some(i) = anc {
                let m = &markings[i];
                if m != &next && m.iter().zip(&next).all(|(x, y)| x <= y) {
                    for (v, &x) in next.iter_mut().zip(m) {
                        if x < *v {
                            *v = OMEGA;
                        }
                    }
                }
                anc = parent[i];
            }
            if seen.contains(&next) {
                continue;
            }
            if markings.len() >= node_budget {
                complete = false;
                break 'outer;
            }
            seen.insert(next.clone());
            markings.push(next);
            parent.push(Some(node));
            queue.push_back(markings.len() - 1);
        }
    }
    KarpMiller { markings, complete }
}

/// `Some(true)` when the net is certified bounded from `start`,
/// `Some(false)` when it is certified unbounded, `None` on budget exhaustion.
pub fn is_bounded(net: &PetriNet, start: &[u64], node_budget: usize) -> Option<bool> {
    let km = karp_miller(net, start, node_budget, None);
    if km.bounded() {
        km.complete.then_some(true)
    } else {
        Some(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn producer_is_unbounded() {
        let net = PetriNet::from_pairs(1, vec![(vec![0], vec![1])]).unwrap();
        let km = karp_miller(&net, &[0], 100, None);
        assert!(km.complete);
        assert!(!km.bounded());
        assert!(km.covers(&[1000]));
        assert_eq!(is_bounded(&net, &[0], 100), Some(false));
    }

    #[test]
    fn mover_is_bounded() {
        let net = PetriNet::from_pairs(2, vec![(vec![1, 0], vec![0, 1])]).unwrap();
        let km = karp_miller(&net, &[2, 0], 100, None);
        assert!(km.complete && km.bounded());
        assert_eq!(km.markings.len(), 3);
        assert!(!km.covers(&[3, 0]));
        assert_eq!(is_bounded(&net, &[2, 0], 100), Some(true));
    }

    #[test]
    fn dead_actions_detected() {
        let net = PetriNet::from_pairs(2, vec![(vec![1, 1], vec![0, 0]), (vec![1, 0], vec![2, 0])]).unwrap();
        let km = karp_miller(&net, &[1, 0], 100, None);
        assert_eq!(km.live_actions(&net), vec![false, true]);
    }
}
