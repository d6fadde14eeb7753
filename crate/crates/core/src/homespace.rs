//! Home-space decision: is every configuration reachable from `X` able to
//! reach `H`?
//!
//! `H` fails to be a home-space for `X` iff some run from `X` passes
//! through `x_1 ∈ W_1, …, x_m ∈ W_m` in order, where `W_i` is a witness for
//! the `i`-th linear component of `H` (the order of the `W_i` does not
//! matter). That chained question is turned into one reachability query on
//! a freeze net, which copies the run onto `m` snapshot banks and freezes
//! bank `i` at the `i`-th checkpoint.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::net::{reachable_set_bounded, Configuration, PetriNet, Trace};
use crate::reach::{decide_with_stats, Budget, DecodedRun, ReachQuery, ReachStats, ReachVerdict, UnknownReason};
use crate::semilinear::{LinearSet, SemilinearSet, SetError};
use crate::witness::{witness_linear, WitnessError, WitnessResult};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomeSpaceQuery {
    pub net: PetriNet,
    pub x: SemilinearSet,
    pub h: SemilinearSet,
    pub budget: Budget,
}

impl HomeSpaceQuery {
    pub fn new(net: PetriNet, x: SemilinearSet, h: SemilinearSet, budget: Budget) -> Result<Self, SetError> {
        for found in [x.dim(), h.dim()] {
            if found != net.dim() {
                return Err(SetError::DimensionMismatch {
                    expected: net.dim(),
                    found,
                });
            }
        }
        Ok(HomeSpaceQuery { net, x, h, budget })
    }
}

/// A run `x ->* x_1 ->* … ->* x_m` with `x ∈ X` and `x_i ∈ W_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    /// Run in the original net starting at `x`.
    pub trace: Trace,
    /// `x_1, …, x_m`.
    pub snapshots: Vec<Configuration>,
    /// `components[i]` is the component of `H` whose witness contains
    /// `snapshots[i]`.
    pub components: Vec<usize>,
    /// `checkpoints[i]` is the number of steps taken before `x_{i+1}`.
    pub checkpoints: Vec<usize>,
}

impl Chain {
    pub fn start(&self) -> &Configuration {
        &self.trace.start
    }

    /// The trace replays and each snapshot is the configuration reached at
    /// its checkpoint.
    pub fn is_consistent(&self, net: &PetriNet) -> bool {
        if !self.trace.replays(net) || self.snapshots.len() != self.checkpoints.len() {
            return false;
        }
        self.checkpoints.windows(2).all(|w| w[0] <= w[1])
            && self.snapshots.iter().zip(&self.checkpoints).all(|(s, &k)| {
                k <= self.trace.steps.len()
                    && net
                        .fire_sequence(&self.trace.start, &self.trace.steps[..k])
                        .is_ok_and(|t| &t.end == s)
            })
    }
}

/// What prevented a definite verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Blocker {
    /// The witness for the given component of `H` could not be built.
    Witness { component: usize, error: WitnessError },
    /// The final freeze-net query was inconclusive.
    Reach(UnknownReason),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HomeSpaceVerdict {
    HomeSpace,
    NotHomeSpace(Chain),
    Unknown(Blocker),
}

impl HomeSpaceVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            HomeSpaceVerdict::HomeSpace => "home-space",
            HomeSpaceVerdict::NotHomeSpace(_) => "not-home-space",
            HomeSpaceVerdict::Unknown(_) => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub verdict: HomeSpaceVerdict,
    /// Witnesses for the components of `H`, in component order (only those
    /// that were built).
    pub witnesses: Vec<WitnessResult>,
    /// Work spent on the freeze-net query, if it was issued.
    pub freeze: Option<ReachStats>,
}

/// Runs home-space checks over one net, reusing witnesses across calls.
pub struct Checker<'a> {
    net: &'a PetriNet,
    budget: Budget,
    cache: HashMap<LinearSet, WitnessResult>,
}

impl<'a> Checker<'a> {
    pub fn new(net: &'a PetriNet, budget: Budget) -> Self {
        Checker {
            net,
            budget,
            cache: HashMap::new(),
        }
    }

    pub fn witness(&mut self, l: &LinearSet) -> Result<WitnessResult, WitnessError> {
        let key = l.normalized();
        if let Some(w) = self.cache.get(&key) {
            return Ok(w.clone());
        }
        let w = witness_linear(self.net, &key, self.budget)?;
        self.cache.insert(key, w.clone());
        Ok(w)
    }

    pub fn check(&mut self, x: &SemilinearSet, h: &SemilinearSet) -> Result<CheckReport, SetError> {
        let d = self.net.dim();
        for found in [x.dim(), h.dim()] {
            if found != d {
                return Err(SetError::DimensionMismatch { expected: d, found });
            }
        }
        let report = |verdict, witnesses, freeze| CheckReport {
            verdict,
            witnesses,
            freeze,
        };
        if x.is_empty() {
            return Ok(report(HomeSpaceVerdict::HomeSpace, Vec::new(), None));
        }
        if h.is_empty() {
            let start = Configuration::new(x.some_member().expect("nonempty set"));
            let chain = Chain {
                trace: Trace::empty(start),
                snapshots: Vec::new(),
                components: Vec::new(),
                checkpoints: Vec::new(),
            };
            return Ok(report(HomeSpaceVerdict::NotHomeSpace(chain), Vec::new(), None));
        }
        // All witnesses are built first so that the verdict does not depend
        // on the order of the components.
        let mut witnesses = Vec::new();
        let mut blocker = None;
        for (i, component) in h.components().iter().enumerate() {
            match self.witness(component) {
                Ok(w) => witnesses.push(w),
                Err(error) => {
                    blocker.get_or_insert(Blocker::Witness { component: i, error });
                }
            }
        }
        // an empty witness means every configuration reaches that component
        if witnesses.iter().any(|w| w.witness.is_empty()) {
            return Ok(report(HomeSpaceVerdict::HomeSpace, witnesses, None));
        }
        if let Some(blocker) = blocker {
            return Ok(report(HomeSpaceVerdict::Unknown(blocker), witnesses, None));
        }
        // Any order of the witnesses gives the same answer; a canonical one
        // makes the query itself independent of how H was written.
        let mut order: Vec<usize> = (0..witnesses.len()).collect();
        let keys: Vec<LinearSet> = h.components().iter().map(LinearSet::normalized).collect();
        order.sort_by(|&a, &b| keys[a].cmp(&keys[b]).then(a.cmp(&b)));
        let sets: Vec<SemilinearSet> = order.iter().map(|&i| witnesses[i].witness.clone()).collect();
        let freeze = build_freeze_net(self.net, x, &sets)?;
        let (verdict, stats) = decide_with_stats(&freeze.query, self.budget);
        let verdict = match verdict {
            ReachVerdict::Reachable(w) => {
                let mut chain = freeze.decode(&w.run);
                chain.components = order;
                HomeSpaceVerdict::NotHomeSpace(chain)
            }
            ReachVerdict::Unreachable(_) => HomeSpaceVerdict::HomeSpace,
            ReachVerdict::Unknown(r) => HomeSpaceVerdict::Unknown(Blocker::Reach(r)),
        };
        Ok(report(verdict, witnesses, Some(stats)))
    }
}

pub fn check(q: &HomeSpaceQuery) -> Result<CheckReport, SetError> {
    Checker::new(&q.net, q.budget).check(&q.x, &q.h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    SelectX,
    PumpX,
    Enter,
    Original { action: usize },
    Checkpoint,
    Gadget,
}

/// The freeze net together with what is needed to read chains back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreezeNet {
    pub query: ReachQuery,
    dim: usize,
    banks: usize,
    roles: Vec<Role>,
}

impl FreezeNet {
    /// Number of snapshot banks `m`.
    pub fn stages(&self) -> usize {
        self.banks
    }

    pub fn original_dim(&self) -> usize {
        self.dim
    }

    /// Turns a run of the freeze net into a chain in the original net;
    /// snapshot `i` belongs to witness `i` of the net.
    pub fn decode(&self, run: &DecodedRun) -> Chain {
        let net = &self.query.net;
        let d = self.dim;
        let mut cur = run.from.clone();
        let mut start = None;
        let mut steps = Vec::new();
        let mut snapshots = Vec::new();
        let mut checkpoints = Vec::new();
        for &s in &run.steps {
            cur = net.fire(&cur, s).expect("decoded runs replay");
            match self.roles[s] {
                Role::Enter => start = Some(Configuration::from(&cur[..d])),
                Role::Original { action } => steps.push(action),
                Role::Checkpoint => {
                    snapshots.push(Configuration::from(&cur[..d]));
                    checkpoints.push(steps.len());
                }
                Role::SelectX | Role::PumpX | Role::Gadget => {}
            }
        }
        let start = start.expect("every accepted run enters stage 0");
        let end = snapshots.last().cloned().unwrap_or_else(|| start.clone());
        Chain {
            trace: Trace { start, steps, end },
            components: (0..snapshots.len()).collect(),
            snapshots,
            checkpoints,
        }
    }
}

/// Builds the freeze net for `X` and witnesses `W_1..W_m` (`m ≥ 1`).
///
/// Places: banks `0..=m` of `d` places each, stage places `s_0..s_m`, an
/// initial token place, one selection place per component of `X`, and per
/// witness a `ready`, a `done` and one selection place per component.
pub fn build_freeze_net(net: &PetriNet, x: &SemilinearSet, witnesses: &[SemilinearSet]) -> Result<FreezeNet, SetError> {
    let d = net.dim();
    let m = witnesses.len();
    assert!(m >= 1, "at least one witness is required");
    for found in std::iter::once(x.dim()).chain(witnesses.iter().map(|w| w.dim())) {
        if found != d {
            return Err(SetError::DimensionMismatch { expected: d, found });
        }
    }
    let bank = |b: usize, i: usize| b * d + i;
    let stage = |j: usize| (m + 1) * d + j;
    let init = (m + 1) * d + m + 1;
    let x_sel = |c: usize| init + 1 + c;
    let mut next = init + 1 + x.components().len();
    let mut ready = Vec::new();
    let mut done = Vec::new();
    let mut w_sel = Vec::new();
    for w in witnesses {
        ready.push(next);
        done.push(next + 1);
        w_sel.push((0..w.components().len()).map(|c| next + 2 + c).collect::<Vec<_>>());
        next += 2 + w.components().len();
    }
    let width = next;

    let mut freeze = PetriNet::new(width).expect("positive width");
    let mut roles = Vec::new();
    let mut add = |name: String, pre: Vec<u64>, post: Vec<u64>, role: Role| {
        freeze
            .add_named_action(name, pre, post)
            .expect("freeze actions are well-formed");
        roles.push(role);
    };
    let vec_with = |parts: &[(usize, u64)], banks: &[usize], v: &[u64]| {
        let mut out = vec![0u64; width];
        for &(p, n) in parts {
            out[p] += n;
        }
        for &b in banks {
            for (i, &n) in v.iter().enumerate() {
                out[bank(b, i)] += n;
            }
        }
        out
    };
    let zero = vec![0u64; d];
    let all_banks: Vec<usize> = (0..=m).collect();

    for (c, comp) in x.components().iter().enumerate() {
        add(
            format!("x{c}.select"),
            vec_with(&[(init, 1)], &[], &zero),
            vec_with(&[(x_sel(c), 1)], &all_banks, comp.base()),
            Role::SelectX,
        );
        for (j, p) in comp.periods().iter().enumerate() {
            add(
                format!("x{c}.pump{j}"),
                vec_with(&[(x_sel(c), 1)], &[], &zero),
                vec_with(&[(x_sel(c), 1)], &all_banks, p),
                Role::PumpX,
            );
        }
        add(
            format!("x{c}.enter"),
            vec_with(&[(x_sel(c), 1)], &[], &zero),
            vec_with(&[(stage(0), 1)], &[], &zero),
            Role::Enter,
        );
    }
    for j in 0..m {
        let live: Vec<usize> = std::iter::once(0).chain(j + 1..=m).collect();
        for (a, act) in net.actions().iter().enumerate() {
            add(
                format!("{}@{j}", act.name),
                vec_with(&[(stage(j), 1)], &live, &act.pre),
                vec_with(&[(stage(j), 1)], &live, &act.post),
                Role::Original { action: a },
            );
        }
    }
    for i in 1..=m {
        add(
            format!("checkpoint{i}"),
            vec_with(&[(stage(i - 1), 1)], &[], &zero),
            vec_with(&[(stage(i), 1), (ready[i - 1], 1)], &[], &zero),
            Role::Checkpoint,
        );
    }
    for (w_idx, w) in witnesses.iter().enumerate() {
        let i = w_idx + 1;
        for (c, comp) in w.components().iter().enumerate() {
            let sel = w_sel[w_idx][c];
            add(
                format!("w{i}.{c}.base"),
                vec_with(&[(ready[w_idx], 1)], &[i], comp.base()),
                vec_with(&[(sel, 1)], &[], &zero),
                Role::Gadget,
            );
            for (j, p) in comp.periods().iter().enumerate() {
                add(
                    format!("w{i}.{c}.period{j}"),
                    vec_with(&[(sel, 1)], &[i], p),
                    vec_with(&[(sel, 1)], &[], &zero),
                    Role::Gadget,
                );
            }
            add(
                format!("w{i}.{c}.done"),
                vec_with(&[(sel, 1)], &[], &zero),
                vec_with(&[(done[w_idx], 1)], &[], &zero),
                Role::Gadget,
            );
        }
    }

    let mut target_base = vec![0u64; width];
    target_base[stage(m)] = 1;
    for &p in &done {
        target_base[p] = 1;
    }
    let target_periods = (0..d)
        .map(|i| {
            let mut p = vec![0u64; width];
            p[bank(0, i)] = 1;
            p
        })
        .collect();
    let mut source = vec![0u64; width];
    source[init] = 1;
    let query = ReachQuery::new(
        freeze,
        SemilinearSet::from_linear(LinearSet::point(source)),
        SemilinearSet::from_linear(LinearSet::new(target_base, target_periods)?),
    )?;
    Ok(FreezeNet {
        query,
        dim: d,
        banks: m,
        roles,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BruteVerdict {
    HomeSpace,
    /// A reachable configuration that cannot reach `H`.
    NotHomeSpace(Configuration),
    Inconclusive,
}

/// Ground truth by exhaustive exploration from a finite `X`. Inconclusive
/// as soon as some reachability set exceeds `node_budget`.
pub fn brute_force_check(net: &PetriNet, x: &[Configuration], h: &SemilinearSet, node_budget: usize) -> BruteVerdict {
    let mut reach: Vec<Configuration> = Vec::new();
    for start in x {
        let e = reachable_set_bounded(net, start, node_budget);
        if !e.complete {
            return BruteVerdict::Inconclusive;
        }
        reach.extend(e.configs);
    }
    reach.sort();
    reach.dedup();
    match cannot_reach(net, &reach, |c| h.member(c).unwrap_or(false)).into_iter().next() {
        Some(c) => BruteVerdict::NotHomeSpace(c),
        None => BruteVerdict::HomeSpace,
    }
}

/// Members of the post-closed set `closed` from which no configuration
/// satisfying `goal` is reachable, in lexicographic order.
pub fn cannot_reach(net: &PetriNet, closed: &[Configuration], goal: impl Fn(&[u64]) -> bool) -> Vec<Configuration> {
    let index: HashMap<&Configuration, usize> = closed.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); closed.len()];
    for (i, c) in closed.iter().enumerate() {
        for (_, next) in net.successors(c) {
            let j = index[&next];
            preds[j].push(i);
        }
    }
    let mut good: HashSet<usize> = HashSet::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    for (i, c) in closed.iter().enumerate() {
        if goal(c) {
            good.insert(i);
            queue.push_back(i);
        }
    }
    while let Some(j) = queue.pop_front() {
        for &i in &preds[j] {
            if good.insert(i) {
                queue.push_back(i);
            }
        }
    }
    let mut out: Vec<Configuration> = (0..closed.len())
        .filter(|i| !good.contains(i))
        .map(|i| closed[i].clone())
        .collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mover() -> PetriNet {
        PetriNet::from_pairs(2, vec![(vec![1, 0], vec![0, 1])]).unwrap()
    }

    fn points(d: usize, pts: &[&[u64]]) -> SemilinearSet {
        SemilinearSet::from_points(d, pts.iter().map(|p| p.to_vec())).unwrap()
    }

    fn cfg(v: &[u64]) -> Configuration {
        Configuration::from(v)
    }

    fn run(net: &PetriNet, x: &SemilinearSet, h: &SemilinearSet) -> HomeSpaceVerdict {
        let q = HomeSpaceQuery::new(net.clone(), x.clone(), h.clone(), Budget::default()).unwrap();
        check(&q).unwrap().verdict
    }

    #[test]
    fn mover_examples() {
        let net = mover();
        let x = points(2, &[&[1, 0]]);
        assert_eq!(run(&net, &x, &points(2, &[&[0, 1]])), HomeSpaceVerdict::HomeSpace);
        let HomeSpaceVerdict::NotHomeSpace(chain) = run(&net, &x, &points(2, &[&[0, 0]])) else {
            panic!("expected a chain");
        };
        assert!(chain.is_consistent(&net));
        assert_eq!(chain.start(), &cfg(&[1, 0]));
        assert_eq!(chain.snapshots.len(), 1);
    }

    #[test]
    fn edge_cases() {
        let net = mover();
        let empty = SemilinearSet::empty(2);
        assert_eq!(run(&net, &empty, &empty), HomeSpaceVerdict::HomeSpace);
        let x = points(2, &[&[1, 0]]);
        assert!(matches!(run(&net, &x, &empty), HomeSpaceVerdict::NotHomeSpace(_)));
        let still = PetriNet::new(2).unwrap();
        assert_eq!(run(&still, &x, &points(2, &[&[1, 0], &[3, 3]])), HomeSpaceVerdict::HomeSpace);
    }

    #[test]
    fn freeze_net_shape() {
        let net = mover();
        let x = points(2, &[&[1, 0]]);
        let w = vec![points(2, &[&[0, 0]]), points(2, &[&[1, 1], &[2, 0]])];
        let f = build_freeze_net(&net, &x, &w).unwrap();
        let m = 2;
        let gadget_places = (2 + 1) + (2 + 2);
        assert_eq!(f.query.net.dim(), (m + 1) * 2 + (m + 1) + 1 + 1 + gadget_places);
        let originals = f.query.net.actions().iter().filter(|a| a.name.contains('@')).count();
        assert_eq!(originals, net.actions().len() * m);
    }

    #[test]
    fn freeze_net_single_stage_matches_direct_reachability() {
        let net = mover();
        let x = points(2, &[&[1, 0]]);
        for w in [points(2, &[&[0, 1]]), points(2, &[&[0, 0]]), points(2, &[&[1, 0]])] {
            let f = build_freeze_net(&net, &x, std::slice::from_ref(&w)).unwrap();
            let direct = crate::reach::decide(&ReachQuery::new(net.clone(), x.clone(), w).unwrap(), Budget::default());
            let frozen = crate::reach::decide(&f.query, Budget::default());
            assert_eq!(direct.is_reachable(), frozen.is_reachable());
            assert!(direct.is_definite() && frozen.is_definite());
        }
    }

    #[test]
    fn freeze_net_with_mover_witness_is_unreachable() {
        let net = mover();
        let x = points(2, &[&[1, 0]]);
        let w = crate::witness::witness_singleton(&net, &[0, 1], Budget::default()).unwrap();
        let f = build_freeze_net(&net, &x, &[w.witness]).unwrap();
        assert!(crate::reach::decide(&f.query, Budget::default()).is_unreachable());
    }

    #[test]
    fn brute_force_examples() {
        let net = mover();
        let x = [cfg(&[1, 0])];
        assert_eq!(brute_force_check(&net, &x, &points(2, &[&[0, 1]]), 1000), BruteVerdict::HomeSpace);
        assert_eq!(
            brute_force_check(&net, &x, &points(2, &[&[0, 0]]), 1000),
            BruteVerdict::NotHomeSpace(cfg(&[0, 1]))
        );
        let producer = PetriNet::from_pairs(1, vec![(vec![0], vec![1])]).unwrap();
        assert_eq!(
            brute_force_check(&producer, &[cfg(&[0])], &points(1, &[&[0]]), 10_000),
            BruteVerdict::Inconclusive
        );
    }
}
