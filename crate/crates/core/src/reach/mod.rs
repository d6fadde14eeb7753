//! Three-valued reachability between semilinear sets.
//!
//! `X ->* Y` is split into one question per pair of linear components, each
//! reduced to a single-configuration question on an augmented net
//! ([`reduce_to_pair`]). A pair is then handed to a portfolio of sound
//! backends: the state equation, the Karp–Miller tree and breadth-first
//! search. Definite answers are always correct; anything the portfolio
//! cannot settle within its budget comes back as
//! [`ReachVerdict::Unknown`].

mod coverability;
mod lp;
mod pair;

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::time::{Duration, Instant};

pub use coverability::{is_bounded, karp_miller, KarpMiller, OMEGA};
pub use pair::{reduce_to_pair, DecodedRun, PairInstance};

use crate::net::{Configuration, PetriNet, Trace};
use crate::semilinear::{find_solution, ConstraintSystem, SemilinearSet, SetError};

/// Work allowance for one reachability query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Explored configurations (or candidates) per pair instance.
    pub nodes: usize,
    /// Wall-clock cap for one [`decide`] call.
    pub time: Duration,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            nodes: 100_000,
            time: Duration::from_secs(10),
        }
    }
}

impl Budget {
    pub fn with_nodes(nodes: usize) -> Self {
        Budget {
            nodes,
            ..Budget::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachQuery {
    pub net: PetriNet,
    pub source: SemilinearSet,
    pub target: SemilinearSet,
}

impl ReachQuery {
    pub fn new(net: PetriNet, source: SemilinearSet, target: SemilinearSet) -> Result<Self, SetError> {
        for found in [source.dim(), target.dim()] {
            if found != net.dim() {
                return Err(SetError::DimensionMismatch {
                    expected: net.dim(),
                    found,
                });
            }
        }
        Ok(ReachQuery { net, source, target })
    }
}

/// Why a pair instance is unreachable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Certificate {
    /// The whole reachability set was enumerated.
    ExhaustedStateSpace,
    /// No nonnegative integer firing-count vector solves the marking
    /// equation; `restricted` is set when dead actions were removed first.
    StateEquationInfeasible { restricted: bool },
    /// The precondition of the switch action is not coverable.
    NotCoverable,
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::ExhaustedStateSpace => "exhausted-state-space",
            Certificate::StateEquationInfeasible { .. } => "state-equation-infeasible",
            Certificate::NotCoverable => "not-coverable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnknownReason {
    BudgetExhausted,
    BackendGap,
}

impl UnknownReason {
    pub fn kind(&self) -> &'static str {
        match self {
            UnknownReason::BudgetExhausted => "budget-exhausted",
            UnknownReason::BackendGap => "backend-gap",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachWitness {
    /// Trace of the pair instance's augmented net.
    pub trace: Trace,
    pub source_component: usize,
    pub target_component: usize,
    /// The decoded run in the original net.
    pub run: DecodedRun,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReachVerdict {
    Reachable(Box<ReachWitness>),
    /// One certificate per (source, target) component pair; empty when one
    /// of the sets is empty.
    Unreachable(Vec<Certificate>),
    Unknown(UnknownReason),
}

impl ReachVerdict {
    pub fn is_reachable(&self) -> bool {
        matches!(self, ReachVerdict::Reachable(_))
    }

    pub fn is_unreachable(&self) -> bool {
        matches!(self, ReachVerdict::Unreachable(_))
    }

    pub fn is_definite(&self) -> bool {
        !matches!(self, ReachVerdict::Unknown(_))
    }
}

impl fmt::Display for ReachVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReachVerdict::Reachable(_) => write!(f, "reachable"),
            ReachVerdict::Unreachable(_) => write!(f, "unreachable"),
            ReachVerdict::Unknown(_) => write!(f, "unknown"),
        }
    }
}

/// Work counters accumulated over queries.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReachStats {
    pub queries: u64,
    pub pairs: u64,
    pub nodes: u64,
    pub unknown: u64,
}

impl ReachStats {
    pub fn absorb(&mut self, other: &ReachStats) {
        self.queries += other.queries;
        self.pairs += other.pairs;
        self.nodes += other.nodes;
        self.unknown += other.unknown;
    }
}

/// Outcome of one backend on one pair instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairVerdict {
    Reachable(Trace),
    Unreachable(Certificate),
    Unknown(UnknownReason),
}

struct Limits {
    nodes: usize,
    deadline: Instant,
}

impl Limits {
    fn expired(&self) -> bool {
        Instant::now() >= self.deadline
    }
}

pub fn decide(q: &ReachQuery, budget: Budget) -> ReachVerdict {
    decide_with_stats(q, budget).0
}

/// Disjunction over all component pairs: reachable as soon as one pair is,
/// unreachable only when every pair is proven unreachable.
pub fn decide_with_stats(q: &ReachQuery, budget: Budget) -> (ReachVerdict, ReachStats) {
    let deadline = Instant::now() + budget.time;
    let mut stats = ReachStats {
        queries: 1,
        ..ReachStats::default()
    };
    let mut certificates = Vec::new();
    let mut unknown = None;
    for (i, src) in q.source.components().iter().enumerate() {
        for (j, tgt) in q.target.components().iter().enumerate() {
            let pair = reduce_to_pair(&q.net, &src.normalized(), &tgt.normalized())
                .expect("query dimensions were validated");
            stats.pairs += 1;
            let limits = Limits {
                nodes: budget.nodes,
                deadline,
            };
            let (verdict, used) = portfolio(&pair, &limits);
            stats.nodes += used as u64;
            match verdict {
                PairVerdict::Reachable(trace) => {
                    let run = pair.decode(&trace).expect("backend traces replay");
                    let witness = ReachWitness {
                        trace,
                        source_component: i,
                        target_component: j,
                        run,
                    };
                    return (ReachVerdict::Reachable(Box::new(witness)), stats);
                }
                PairVerdict::Unreachable(c) => certificates.push(c),
                PairVerdict::Unknown(r) => {
                    unknown.get_or_insert(r);
                }
            }
        }
    }
    match unknown {
        Some(r) => {
            stats.unknown += 1;
            (ReachVerdict::Unknown(r), stats)
        }
        None => (ReachVerdict::Unreachable(certificates), stats),
    }
}

/// State equation, then Karp–Miller (with a second state-equation pass
/// restricted to live actions), then breadth-first search.
fn portfolio(p: &PairInstance, limits: &Limits) -> (PairVerdict, usize) {
    let share = (limits.nodes / 4).max(1);
    let mut used = 0;
    let all = vec![true; p.net.actions().len()];
    match state_equation(p, &all, share) {
        Some(Ok(false)) => {
            return (
                PairVerdict::Unreachable(Certificate::StateEquationInfeasible { restricted: false }),
                share,
            )
        }
        Some(_) => used += share,
        None => used += share,
    }
    if limits.expired() {
        return (PairVerdict::Unknown(UnknownReason::BudgetExhausted), used);
    }
    let km = karp_miller(&p.net, &p.initial, share, Some(limits.deadline));
    used += km.markings.len();
    if km.complete {
        let switch_pre = &p.net.actions()[p.switch_action()].pre;
        if !km.covers(switch_pre) {
            return (PairVerdict::Unreachable(Certificate::NotCoverable), used);
        }
        if km.bounded() && !km.markings.iter().any(|m| m.as_slice() == p.final_config.as_slice()) {
            return (PairVerdict::Unreachable(Certificate::ExhaustedStateSpace), used);
        }
        let live = km.live_actions(&p.net);
        if live.iter().any(|l| !l) {
            if let Some(Ok(false)) = state_equation(p, &live, share) {
                return (
                    PairVerdict::Unreachable(Certificate::StateEquationInfeasible { restricted: true }),
                    used + share,
                );
            }
            used += share;
        }
    }
    if limits.expired() {
        return (PairVerdict::Unknown(UnknownReason::BudgetExhausted), used);
    }
    let rest = Limits {
        nodes: limits.nodes.saturating_sub(used).max(share),
        deadline: limits.deadline,
    };
    let (v, n) = bfs(p, &rest);
    (v, used + n)
}

/// Marking-equation feasibility over the allowed actions:
/// `Some(Ok(true))` feasible, `Some(Ok(false))` infeasible, `None` when the
/// search ran out of candidates.
fn state_equation(p: &PairInstance, allowed: &[bool], limit: usize) -> Option<Result<bool, ()>> {
    let cols: Vec<usize> = (0..allowed.len()).filter(|&i| allowed[i]).collect();
    let incidence = p.net.incidence();
    let mut sys = ConstraintSystem::new(cols.len());
    for (place, row) in incidence.iter().enumerate() {
        let coeffs: Vec<i64> = cols.iter().map(|&c| row[c]).collect();
        let rhs = p.final_config[place] as i64 - p.initial[place] as i64;
        if rhs == 0 && coeffs.iter().all(|&c| c == 0) {
            continue;
        }
        sys.push_eq(coeffs, rhs);
    }
    let rows: Vec<Vec<i64>> = sys.equalities().iter().map(|r| r.coeffs.clone()).collect();
    let rhs: Vec<i64> = sys.equalities().iter().map(|r| r.rhs).collect();
    if !lp::rational_feasible(&rows, &rhs) {
        return Some(Ok(false));
    }
    match find_solution(&sys, limit) {
        Ok(found) => Some(Ok(found.is_some())),
        Err(_) => None,
    }
}

/// Classical marking-equation refuter on a pair instance.
pub fn state_equation_backend(p: &PairInstance, budget: Budget) -> PairVerdict {
    match state_equation(p, &vec![true; p.net.actions().len()], budget.nodes) {
        Some(Ok(false)) => PairVerdict::Unreachable(Certificate::StateEquationInfeasible { restricted: false }),
        Some(_) => PairVerdict::Unknown(UnknownReason::BackendGap),
        None => PairVerdict::Unknown(UnknownReason::BudgetExhausted),
    }
}

/// Karp–Miller refuter: unreachable when the switch precondition cannot
/// be covered, and also when the tree is finite and misses the final
/// configuration.
pub fn coverability_backend(p: &PairInstance, budget: Budget) -> PairVerdict {
    let km = karp_miller(&p.net, &p.initial, budget.nodes, Some(Instant::now() + budget.time));
    if !km.complete {
        return PairVerdict::Unknown(UnknownReason::BudgetExhausted);
    }
    if !km.covers(&p.net.actions()[p.switch_action()].pre) {
        return PairVerdict::Unreachable(Certificate::NotCoverable);
    }
    if km.bounded() && !km.markings.iter().any(|m| m.as_slice() == p.final_config.as_slice()) {
        return PairVerdict::Unreachable(Certificate::ExhaustedStateSpace);
    }
    PairVerdict::Unknown(UnknownReason::BackendGap)
}

/// Forward breadth-first search for the final configuration.
pub fn bfs_backend(p: &PairInstance, budget: Budget) -> PairVerdict {
    let limits = Limits {
        nodes: budget.nodes,
        deadline: Instant::now() + budget.time,
    };
    bfs(p, &limits).0
}

fn bfs(p: &PairInstance, limits: &Limits) -> (PairVerdict, usize) {
    let net = &p.net;
    let target = &p.final_config;
    // Places no action can decrease: exceeding the target there is fatal.
    let monotone: Vec<usize> = (0..net.dim())
        .filter(|&i| net.actions().iter().all(|a| a.post[i] >= a.pre[i]))
        .collect();
    let dead_end = |c: &Configuration| monotone.iter().any(|&i| c[i] > target[i]);

    let mut parent: HashMap<Configuration, Option<(usize, usize)>> = HashMap::new();
    let mut order: Vec<Configuration> = Vec::new();
    let mut queue = VecDeque::new();
    parent.insert(p.initial.clone(), None);
    order.push(p.initial.clone());
    queue.push_back(0usize);
    let found = if &p.initial == target { Some(0) } else { None };
    let mut found = found;
    let mut truncated = false;
    'outer: while found.is_none() {
        let Some(idx) = queue.pop_front() else { break };
        if order.len() % 1024 == 0 && limits.expired() {
            truncated = true;
            break;
        }
        let cur = order[idx].clone();
        for (a, next) in net.successors(&cur) {
            if parent.contains_key(&next) || dead_end(&next) {
                continue;
            }
            if order.len() >= limits.nodes {
                truncated = true;
                break 'outer;
            }
            parent.insert(next.clone(), Some((idx, a)));
            order.push(next.clone());
            if &next == target {
                found = Some(order.len() - 1);
                break 'outer;
            }
            queue.push_back(order.len() - 1);
        }
    }
    let explored = order.len();
    if let Some(mut idx) = found {
        let mut steps = Vec::new();
        while let Some(Some((prev, a))) = parent.get(&order[idx]) {
            steps.push(*a);
            idx = *prev;
        }
        steps.reverse();
        let trace = Trace {
            start: p.initial.clone(),
            steps,
            end: target.clone(),
        };
        return (PairVerdict::Reachable(trace), explored);
    }
    if truncated {
        (PairVerdict::Unknown(UnknownReason::BudgetExhausted), explored)
    } else {
        (PairVerdict::Unreachable(Certificate::ExhaustedStateSpace), explored)
    }
}
