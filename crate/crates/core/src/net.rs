//! Petri nets, configurations and firing semantics.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::ops::Deref;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("a net needs at least one place")]
    ZeroDimension,
    #[error("action `{name}`: expected vectors of length {expected}, got {found}")]
    DimensionMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("duplicate action name `{0}`")]
    DuplicateName(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FireError {
    #[error("action index {index} out of range ({count} actions)")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("action `{action}` not enabled: place {place} holds {have}, needs {need}")]
    NotEnabled {
        action: String,
        place: usize,
        have: u64,
        need: u64,
    },
    #[error("configuration has length {found}, net has dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("token count overflow in place {0}")]
    Overflow(usize),
}

/// Failure of [`PetriNet::fire_sequence`], carrying the position of the
/// first step that could not fire.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {position}: {source}")]
pub struct SequenceError {
    pub position: usize,
    #[source]
    pub source: FireError,
}

/// A vector of token counts, one per place.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Configuration(Vec<u64>);

impl Configuration {
    pub fn new(entries: Vec<u64>) -> Self {
        Configuration(entries)
    }

    pub fn zero(dim: usize) -> Self {
        Configuration(vec![0; dim])
    }

    /// Total number of tokens.
    pub fn norm(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn covers(&self, other: &[u64]) -> bool {
        self.0.len() == other.len() && self.0.iter().zip(other).all(|(a, b)| a >= b)
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.0
    }
}

impl Deref for Configuration {
    type Target = [u64];
    fn deref(&self) -> &[u64] {
        &self.0
    }
}

impl From<Vec<u64>> for Configuration {
    fn from(v: Vec<u64>) -> Self {
        Configuration(v)
    }
}

impl From<&[u64]> for Configuration {
    fn from(v: &[u64]) -> Self {
        Configuration(v.to_vec())
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Action {
    pub name: String,
    pub pre: Vec<u64>,
    pub post: Vec<u64>,
}

impl Action {
    /// `‖post‖ − ‖pre‖`, the change in token count caused by one firing.
    pub fn norm_delta(&self) -> i128 {
        self.post.iter().map(|&v| v as i128).sum::<i128>()
            - self.pre.iter().map(|&v| v as i128).sum::<i128>()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PetriNet {
    dim: usize,
    actions: Vec<Action>,
}

impl PetriNet {
    pub fn new(dim: usize) -> Result<Self, NetError> {
        if dim == 0 {
            return Err(NetError::ZeroDimension);
        }
        Ok(PetriNet {
            dim,
            actions: Vec::new(),
        })
    }

    /// Builds a net from `(pre, post)` pairs, naming the actions `a0`, `a1`, ...
    pub fn from_pairs(dim: usize, pairs: Vec<(Vec<u64>, Vec<u64>)>) -> Result<Self, NetError> {
        let mut net = PetriNet::new(dim)?;
        for (pre, post) in pairs {
            net.add_action(pre, post)?;
        }
        Ok(net)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn action(&self, index: usize) -> Option<&Action> {
        self.actions.get(index)
    }

    /// Adds an action with a synthesized name and returns its index.
    pub fn add_action(&mut self, pre: Vec<u64>, post: Vec<u64>) -> Result<usize, NetError> {
        let mut n = self.actions.len();
        let mut name = format!("a{n}");
        while self.actions.iter().any(|a| a.name == name) {
            n += 1;
            name = format!("a{n}");
        }
        self.add_named_action(name, pre, post)
    }

    pub fn add_named_action(
        &mut self,
        name: impl Into<String>,
        pre: Vec<u64>,
        post: Vec<u64>,
    ) -> Result<usize, NetError> {
        let name = name.into();
        for v in [&pre, &post] {
            if v.len() != self.dim {
                return Err(NetError::DimensionMismatch {
                    name,
                    expected: self.dim,
                    found: v.len(),
                });
            }
        }
        if self.actions.iter().any(|a| a.name == name) {
            return Err(NetError::DuplicateName(name));
        }
        self.actions.push(Action { name, pre, post });
        Ok(self.actions.len() - 1)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a.name == name)
    }

    pub fn is_enabled(&self, c: &[u64], index: usize) -> bool {
        match self.actions.get(index) {
            Some(a) => c.len() == self.dim && c.iter().zip(&a.pre).all(|(x, p)| x >= p),
            None => false,
        }
    }

    pub fn fire(&self, c: &Configuration, index: usize) -> Result<Configuration, FireError> {
        let action = self.actions.get(index).ok_or(FireError::IndexOutOfRange {
            index,
            count: self.actions.len(),
        })?;
        if c.len() != self.dim {
            return Err(FireError::DimensionMismatch {
                expected: self.dim,
                found: c.len(),
            });
        }
        let mut out = Vec::with_capacity(self.dim);
        for (place, ((&have, &need), &add)) in c.iter().zip(&action.pre).zip(&action.post).enumerate()
        {
            if have < need {
                return Err(FireError::NotEnabled {
                    action: action.name.clone(),
                    place,
                    have,
                    need,
                });
            }
            out.push((have - need).checked_add(add).ok_or(FireError::Overflow(place))?);
        }
        Ok(Configuration(out))
    }

    pub fn fire_sequence(&self, c: &Configuration, steps: &[usize]) -> Result<Trace, SequenceError> {
        let mut current = c.clone();
        for (position, &i) in steps.iter().enumerate() {
            current = self
                .fire(&current, i)
                .map_err(|source| SequenceError { position, source })?;
        }
        Ok(Trace {
            start: c.clone(),
            steps: steps.to_vec(),
            end: current,
        })
    }

    /// Successors of `c` in action declaration order, paired with the action index.
    pub fn successors<'a>(
        &'a self,
        c: &'a Configuration,
    ) -> impl Iterator<Item = (usize, Configuration)> + 'a {
        (0..self.actions.len()).filter_map(move |i| self.fire(c, i).ok().map(|n| (i, n)))
    }

    /// Incidence matrix, one row per place and one column per action.
    pub fn incidence(&self) -> Vec<Vec<i64>> {
        (0..self.dim)
            .map(|p| {
                self.actions
                    .iter()
                    .map(|a| a.post[p] as i64 - a.pre[p] as i64)
                    .collect()
            })
            .collect()
    }
}

/// A configuration together with a fired sequence of action indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub start: Configuration,
    pub steps: Vec<usize>,
    pub end: Configuration,
}

impl Trace {
    pub fn empty(start: Configuration) -> Self {
        Trace {
            end: start.clone(),
            start,
            steps: Vec::new(),
        }
    }

    /// Replays the trace on `net` and checks that it ends where it claims.
    pub fn replays(&self, net: &PetriNet) -> bool {
        matches!(net.fire_sequence(&self.start, &self.steps), Ok(t) if t.end == self.end)
    }
}

/// Result of a budgeted forward exploration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exploration {
    /// Discovered configurations in lexicographic order.
    pub configs: Vec<Configuration>,
    /// True iff the frontier was exhausted, in which case `configs` is the
    /// full reachability set.
    pub complete: bool,
}

/// Breadth-first closure of `{start}` under firing, stopping once
/// `node_budget` configurations have been discovered.
pub fn reachable_set_bounded(net: &PetriNet, start: &Configuration, node_budget: usize) -> Exploration {
    let node_budget = node_budget.max(1);
    let mut seen: HashSet<Configuration> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start.clone());
    let mut complete = true;
    'outer: while let Some(c) = queue.pop_front() {
        for (_, next) in net.successors(&c) {
            if seen.contains(&next) {
                continue;
            }
            if seen.len() >= node_budget {
                complete = false;
                break 'outer;
            }
            seen.insert(next.clone());
            queue.push_back(next);
        }
    }
    let mut configs: Vec<_> = seen.into_iter().collect();
    configs.sort();
    Exploration { configs, complete }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn consumer() -> PetriNet {
        PetriNet::from_pairs(2, vec![(vec![1, 1], vec![0, 0])]).unwrap()
    }

    fn mover() -> PetriNet {
        PetriNet::from_pairs(2, vec![(vec![1, 0], vec![0, 1])]).unwrap()
    }

    fn c(v: &[u64]) -> Configuration {
        Configuration::from(v)
    }

    #[test]
    fn fire_examples() {
        assert_eq!(consumer().fire(&c(&[2, 1]), 0).unwrap(), c(&[1, 0]));
        assert_eq!(mover().fire(&c(&[1, 0]), 0).unwrap(), c(&[0, 1]));
        assert!(matches!(
            consumer().fire(&c(&[0, 3]), 0),
            Err(FireError::NotEnabled { place: 0, .. })
        ));
        assert!(matches!(
            consumer().fire(&c(&[1, 1]), 1),
            Err(FireError::IndexOutOfRange { index: 1, count: 1 })
        ));
    }

    #[test]
    fn fire_sequence_examples() {
        let t = mover().fire_sequence(&c(&[2, 0]), &[0, 0]).unwrap();
        assert_eq!(t.end, c(&[0, 2]));
        assert!(t.replays(&mover()));
        let t = consumer().fire_sequence(&c(&[3, 3]), &[]).unwrap();
        assert_eq!(t.end, c(&[3, 3]));
        let err = consumer().fire_sequence(&c(&[1, 1]), &[0, 0]).unwrap_err();
        assert_eq!(err.position, 1);
    }

    #[test]
    fn bounded_exploration_examples() {
        let e = reachable_set_bounded(&mover(), &c(&[1, 0]), 100);
        assert!(e.complete);
        assert_eq!(e.configs, vec![c(&[0, 1]), c(&[1, 0])]);

        let e = reachable_set_bounded(&consumer(), &c(&[1, 1]), 100);
        assert!(e.complete);
        assert_eq!(e.configs, vec![c(&[0, 0]), c(&[1, 1])]);

        let producer = PetriNet::from_pairs(2, vec![(vec![0, 0], vec![1, 0])]).unwrap();
        let e = reachable_set_bounded(&producer, &c(&[0, 0]), 5);
        assert!(!e.complete);
        assert_eq!(e.configs.len(), 5);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(PetriNet::new(0), Err(NetError::ZeroDimension));
        let mut net = PetriNet::new(2).unwrap();
        net.add_named_action("t", vec![1, 0], vec![0, 1]).unwrap();
        assert_eq!(
            net.add_named_action("t", vec![0, 0], vec![0, 0]),
            Err(NetError::DuplicateName("t".into()))
        );
        assert!(matches!(
            net.add_action(vec![1], vec![0, 0]),
            Err(NetError::DimensionMismatch { found: 1, .. })
        ));
        assert_eq!(net.add_action(vec![0, 0], vec![0, 0]), Ok(1));
        assert_eq!(net.actions()[1].name, "a1");
    }

    #[test]
    fn incidence_matrix() {
        assert_eq!(mover().incidence(), vec![vec![-1], vec![1]]);
    }
}
