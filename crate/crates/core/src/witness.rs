//! Non-home-space witnesses for linear sets.
//!
//! For a linear set `L = {b + Σ u(j)·p_j}` the witness `W` contains exactly
//! the configurations `prmark(y, u) = y + Σ u(j)·p_j` such that the pair
//! `(y, u)` is not in `DCB` (the configuration cannot move to one whose
//! presentation basis is strictly smaller) and either `‖y‖ > ‖b‖`, or
//! `‖y‖ ≤ ‖b‖` and `prmark(y, u)` cannot reach `L`. Every configuration in
//! `W` is stuck outside `L`, and every configuration stuck outside `L`
//! can reach `W`.
//!
//! `DCB` and, for each small `y`, `U_y = {u : prmark(y, u) ->* L}` are
//! upward closed; their minimal bases come from [`crate::vj`] with
//! oracles that reduce partial-vector questions to reachability queries.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use thiserror::Error;

use crate::net::PetriNet;
use crate::reach::{decide_with_stats, Budget, ReachQuery, ReachStats, ReachVerdict};
use crate::semilinear::{
    complement_boxes, vectors_up_to_norm, ConstraintSystem, LinearSet, MinBasis, PartialVector,
    SemilinearSet, SetError, Slot,
};
use crate::vj::{min_basis, Answer, Memoized, UpwardOracle, VjError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("{stage}: oracle could not decide {query}")]
    Inconclusive { stage: String, query: PartialVector },
    #[error("{stage}: oracle inconsistent on {query}")]
    InconsistentOracle { stage: String, query: PartialVector },
    #[error(transparent)]
    Set(#[from] SetError),
}

impl WitnessError {
    fn from_vj(stage: impl Into<String>, e: VjError) -> Self {
        match e {
            VjError::Inconclusive(query) => WitnessError::Inconclusive {
                stage: stage.into(),
                query,
            },
            VjError::InconsistentOracle(query) => WitnessError::InconsistentOracle {
                stage: stage.into(),
                query,
            },
        }
    }
}

/// Call counters shared by the oracles of one construction.
#[derive(Debug, Default)]
pub struct OracleStats {
    calls: AtomicU64,
    shortcuts: AtomicU64,
    reach: Mutex<ReachStats>,
}

impl OracleStats {
    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    /// Oracle calls answered without a reachability query.
    pub fn shortcuts(&self) -> u64 {
        self.shortcuts.load(Ordering::Relaxed)
    }

    pub fn reach(&self) -> ReachStats {
        *self.reach.lock().expect("stats lock")
    }

    fn record(&self, s: &ReachStats) {
        self.reach.lock().expect("stats lock").absorb(s);
    }
}

fn verdict_answer(v: &ReachVerdict) -> Answer {
    match v {
        ReachVerdict::Reachable(_) => Answer::Yes,
        ReachVerdict::Unreachable(_) => Answer::No,
        ReachVerdict::Unknown(_) => Answer::Unknown,
    }
}

/// Oracle for `DCB` over `N^(d+k)`: pairs `(y, u)` for which
/// `prmark(y, u)` can reach some `prmark(y', u')` with `‖y'‖ < ‖y‖`.
/// With no periods this is `DC`, the configurations that can decrease
/// their token count.
///
/// The reduction uses a gadget net with the `d` original places, a budget
/// place `B` and control places `run`, `end`. The source puts the fixed
/// part of the query on the main places (and `‖y‖` on `B`); every `ω`
/// coordinate of `y` becomes a pump adding one token to its place and to
/// `B`, every `ω` coordinate of `u` a pump adding `p_j`. Original actions
/// are gated on `run`. After `stop` moves `run` to `end`, `strip_j`
/// removes `p_j` and `drain_i` removes one token of place `i` together
/// with one token of `B`. The target is `end = 1`, main places empty and
/// `B ≥ 1`: the drained part is `y'`, the stripped part is `P·u'`, and
/// `B` keeps `‖y‖ − ‖y'‖`.
pub struct DcbOracle<'a> {
    net: &'a PetriNet,
    periods: Vec<Vec<u64>>,
    gadget: PetriNet,
    target: SemilinearSet,
    budget: Budget,
    stats: &'a OracleStats,
}

impl<'a> DcbOracle<'a> {
    /// `periods` must be nonzero.
    pub fn new(net: &'a PetriNet, periods: &[Vec<u64>], budget: Budget, stats: &'a OracleStats) -> Self {
        assert!(
            periods.iter().all(|p| p.iter().any(|&v| v > 0)),
            "zero periods must be stripped first"
        );
        let d = net.dim();
        let (b, run, end) = (d, d + 1, d + 2);
        let width = d + 3;
        let unit = |places: &[usize]| -> Vec<u64> {
            let mut v = vec![0; width];
            for &p in places {
                v[p] += 1;
            }
            v
        };
        let widen = |v: &[u64], places: &[usize]| -> Vec<u64> {
            let mut out = unit(places);
            for (o, x) in out.iter_mut().zip(v) {
                *o += x;
            }
            out
        };
        let mut gadget = PetriNet::new(width).expect("positive width");
        let mut add = |name: String, pre: Vec<u64>, post: Vec<u64>| {
            gadget
                .add_named_action(name, pre, post)
                .expect("gadget actions are well-formed");
        };
        for a in net.actions() {
            add(format!("run.{}", a.name), widen(&a.pre, &[run]), widen(&a.post, &[run]));
        }
        add("stop".into(), unit(&[run]), unit(&[end]));
        for (j, p) in periods.iter().enumerate() {
            add(format!("strip.{j}"), widen(p, &[end]), unit(&[end]));
        }
        for i in 0..d {
            add(format!("drain.{i}"), unit(&[i, b, end]), unit(&[end]));
        }
        let target = LinearSet::new(unit(&[end, b]), vec![unit(&[b])]).expect("same width");
        DcbOracle {
            net,
            periods: periods.to_vec(),
            gadget,
            target: SemilinearSet::from_linear(target),
            budget,
            stats,
        }
    }

    pub fn gadget(&self) -> &PetriNet {
        &self.gadget
    }

    /// Source linear set of the gadget for a partial presentation pair.
    pub fn source(&self, v: &PartialVector) -> LinearSet {
        let d = self.net.dim();
        let width = d + 3;
        let (b, run) = (d, d + 1);
        let mut base = vec![0u64; width];
        let mut periods = Vec::new();
        base[run] = 1;
        for (i, s) in v.slots()[..d].iter().enumerate() {
            match s {
                Slot::Fixed(x) => {
                    base[i] += x;
                    base[b] += x;
                }
                Slot::Omega => {
                    let mut p = vec![0; width];
                    p[i] = 1;
                    p[b] = 1;
                    periods.push(p);
                }
            }
        }
        for (j, s) in v.slots()[d..].iter().enumerate() {
            let pj = &self.periods[j];
            match s {
                Slot::Fixed(x) => {
                    for (o, &pv) in base.iter_mut().zip(pj) {
                        *o += x * pv;
                    }
                }
                Slot::Omega => {
                    let mut p = pj.clone();
                    p.resize(width, 0);
                    periods.push(p);
                }
            }
        }
        LinearSet::new(base, periods).expect("same width")
    }

    /// Some instance has `y ≥ p_j` for a period `p_j`; then `(y, u)` is
    /// trivially in `DCB` by moving `p_j` from `y` into `u`.
    fn trivially_member(&self, v: &PartialVector) -> bool {
        let y = &v.slots()[..self.net.dim()];
        self.periods.iter().any(|p| {
            y.iter().zip(p).all(|(s, &pv)| match s {
                Slot::Omega => true,
                Slot::Fixed(x) => *x >= pv,
            })
        })
    }
}

impl UpwardOracle for DcbOracle<'_> {
    fn dim(&self) -> usize {
        self.net.dim() + self.periods.len()
    }

    fn query(&self, v: &PartialVector) -> Answer {
        self.stats.calls.fetch_add(1, Ordering::Relaxed);
        if self.trivially_member(v) {
            self.stats.shortcuts.fetch_add(1, Ordering::Relaxed);
            return Answer::Yes;
        }
        let q = ReachQuery::new(
            self.gadget.clone(),
            SemilinearSet::from_linear(self.source(v)),
            self.target.clone(),
        )
        .expect("gadget dimensions agree");
        let (verdict, s) = decide_with_stats(&q, self.budget);
        self.stats.record(&s);
        verdict_answer(&verdict)
    }
}

/// Does some instance of `x̄` decrease its token count?
pub fn dc_oracle(net: &PetriNet, v: &PartialVector, budget: Budget) -> Answer {
    let stats = OracleStats::default();
    DcbOracle::new(net, &[], budget, &stats).query(v)
}

/// Does some instance of the partial pair `(ȳ, ū)` lie in `DCB`?
pub fn dcb_oracle(net: &PetriNet, periods: &[Vec<u64>], v: &PartialVector, budget: Budget) -> Answer {
    let stats = OracleStats::default();
    DcbOracle::new(net, periods, budget, &stats).query(v)
}

/// Oracle for `U_y = {u ∈ N^k : prmark(y, u) ->* L}` with `y` fixed; the
/// `ω` coordinates of a query become periods of the source set.
pub struct UyOracle<'a> {
    net: &'a PetriNet,
    target: &'a LinearSet,
    y: Vec<u64>,
    budget: Budget,
    stats: &'a OracleStats,
}

impl<'a> UyOracle<'a> {
    pub fn new(net: &'a PetriNet, target: &'a LinearSet, y: Vec<u64>, budget: Budget, stats: &'a OracleStats) -> Self {
        UyOracle {
            net,
            target,
            y,
            budget,
            stats,
        }
    }
}

impl UpwardOracle for UyOracle<'_> {
    fn dim(&self) -> usize {
        self.target.periods().len()
    }

    fn query(&self, v: &PartialVector) -> Answer {
        self.stats.calls.fetch_add(1, Ordering::Relaxed);
        if self.y.as_slice() == self.target.base() {
            self.stats.shortcuts.fetch_add(1, Ordering::Relaxed);
            return Answer::Yes;
        }
        let mut base = self.y.clone();
        let mut periods = Vec::new();
        for (s, p) in v.slots().iter().zip(self.target.periods()) {
            match s {
                Slot::Fixed(x) => {
                    for (o, &pv) in base.iter_mut().zip(p) {
                        *o += x * pv;
                    }
                }
                Slot::Omega => periods.push(p.clone()),
            }
        }
        let source = LinearSet::new(base, periods).expect("same dimension");
        let q = ReachQuery::new(
            self.net.clone(),
            SemilinearSet::from_linear(source),
            SemilinearSet::from_linear(self.target.clone()),
        )
        .expect("same dimension");
        let (verdict, s) = decide_with_stats(&q, self.budget);
        self.stats.record(&s);
        verdict_answer(&verdict)
    }
}

/// Does some instance `u` of `ū` satisfy `prmark(y, u) ->* L`?
pub fn uy_oracle(net: &PetriNet, target: &LinearSet, y: &[u64], u: &PartialVector, budget: Budget) -> Answer {
    let stats = OracleStats::default();
    let l = target.normalized();
    UyOracle::new(net, &l, y.to_vec(), budget, &stats).query(u)
}

/// Everything computed on the way to a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    /// Periods of the normalized linear set, in presentation order.
    pub periods: Vec<Vec<u64>>,
    /// `MIN(DCB)` over `N^(d+k)` (`MIN(DC)` when there are no periods).
    pub min_dcb: MinBasis,
    /// `MIN(U_y)` for each small `y` that needed it.
    pub min_uy: Vec<(Vec<u64>, MinBasis)>,
    /// Pieces over `(y, u)`-space whose image under `prmark` is the witness.
    pub pieces: Vec<SemilinearSet>,
    pub oracle_calls: u64,
    pub oracle_shortcuts: u64,
    pub reach: ReachStats,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessResult {
    pub witness: SemilinearSet,
    pub provenance: Provenance,
}

fn norm_at_least(vars: usize, first: usize, bound: u64) -> ConstraintSystem {
    let coeffs = (0..vars).map(|i| i64::from(i < first)).collect();
    ConstraintSystem::new(vars).geq(coeffs, bound as i64)
}

/// Witness for the singleton `{b}`:
/// `NDC ∩ ({‖x‖ > ‖b‖} ∪ {‖x‖ ≤ ‖b‖ and x cannot reach b})`.
pub fn witness_singleton(net: &PetriNet, b: &[u64], budget: Budget) -> Result<WitnessResult, WitnessError> {
    let d = net.dim();
    if b.len() != d {
        return Err(SetError::DimensionMismatch { expected: d, found: b.len() }.into());
    }
    let stats = OracleStats::default();
    let dc = Memoized::new(DcbOracle::new(net, &[], budget, &stats));
    let min_dc = min_basis(&dc).map_err(|e| WitnessError::from_vj("MIN(DC)", e))?;
    let ndc = complement_boxes(&min_dc);
    let ndc_set = SemilinearSet::from_boxes(d, &ndc)?;
    let bnorm: u64 = b.iter().sum();
    let large = ndc_set.restrict(&norm_at_least(d, d, bnorm + 1))?;

    let target = SemilinearSet::from_linear(LinearSet::point(b.to_vec()));
    let mut stuck = Vec::new();
    for x in vectors_up_to_norm(d, bnorm) {
        if !ndc.iter().any(|bx| bx.has_instance(&x)) {
            continue;
        }
        let q = ReachQuery::new(net.clone(), SemilinearSet::from_linear(LinearSet::point(x.clone())), target.clone())?;
        let (verdict, s) = decide_with_stats(&q, budget);
        stats.record(&s);
        match verdict {
            ReachVerdict::Unreachable(_) => stuck.push(x),
            ReachVerdict::Reachable(_) => {}
            ReachVerdict::Unknown(_) => {
                return Err(WitnessError::Inconclusive {
                    stage: "x ->* b".into(),
                    query: PartialVector::concrete(&x),
                })
            }
        }
    }
    let small = SemilinearSet::from_points(d, stuck)?;
    let witness = large.union(&small)?.simplified();
    Ok(WitnessResult {
        witness,
        provenance: Provenance {
            periods: Vec::new(),
            min_dcb: min_dc,
            min_uy: Vec::new(),
            pieces: vec![large, small],
            oracle_calls: stats.calls(),
            oracle_shortcuts: stats.shortcuts(),
            reach: stats.reach(),
        },
    })
}

/// The `prmark` matrix `[I_d | P]` mapping `(y, u)` to `y + Σ u(j)·p_j`.
fn prmark_matrix(d: usize, periods: &[Vec<u64>]) -> Vec<Vec<u64>> {
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| u64::from(i == j))
                .chain(periods.iter().map(|p| p[i]))
                .collect()
        })
        .collect()
}

fn min_dcb(net: &PetriNet, periods: &[Vec<u64>], budget: Budget, stats: &OracleStats) -> Result<MinBasis, WitnessError> {
    let dcb = Memoized::new(DcbOracle::new(net, periods, budget, stats));
    min_basis(&dcb).map_err(|e| WitnessError::from_vj("MIN(DCB)", e))
}

/// Semilinear witness for a linear set.
pub fn witness_linear(net: &PetriNet, l: &LinearSet, budget: Budget) -> Result<WitnessResult, WitnessError> {
    let d = net.dim();
    if l.dim() != d {
        return Err(SetError::DimensionMismatch { expected: d, found: l.dim() }.into());
    }
    let l = l.normalized();
    let periods = l.periods().to_vec();
    let k = periods.len();
    let stats = OracleStats::default();

    let min_dcb = min_dcb(net, &periods, budget, &stats)?;
    let ndcb = complement_boxes(&min_dcb);
    let bnorm: u64 = l.base().iter().sum();

    let mut pieces = vec![SemilinearSet::from_boxes(d + k, &ndcb)?.restrict(&norm_at_least(d + k, d, bnorm + 1))?];
    let mut min_uy = Vec::new();
    for y in vectors_up_to_norm(d, bnorm) {
        let mut restricted: Vec<PartialVector> = ndcb
            .iter()
            .filter(|bx| PartialVector::new(bx.slots()[..d].to_vec()).has_instance(&y))
            .map(|bx| PartialVector::new(bx.slots()[d..].to_vec()))
            .collect();
        restricted.sort();
        restricted.dedup();
        if restricted.is_empty() {
            continue;
        }
        let oracle = Memoized::new(UyOracle::new(net, &l, y.clone(), budget, &stats));
        let basis = min_basis(&oracle).map_err(|e| WitnessError::from_vj(format!("MIN(U_y) for y={y:?}"), e))?;
        let unreachable = complement_boxes(&basis);
        let mut boxes: Vec<PartialVector> = restricted
            .iter()
            .flat_map(|a| unreachable.iter().filter_map(move |c| a.meet(c)))
            .collect();
        boxes.sort();
        boxes.dedup();
        min_uy.push((y.clone(), basis));
        if !boxes.is_empty() {
            pieces.push(SemilinearSet::from_boxes(k, &boxes)?.prefixed_by(&y));
        }
    }

    let matrix = prmark_matrix(d, &periods);
    let offset = vec![0; d];
    let mut witness = SemilinearSet::empty(d);
    for piece in &pieces {
        witness = witness.union(&piece.image_affine(&matrix, &offset)?)?;
    }
    Ok(WitnessResult {
        witness: witness.simplified(),
        provenance: Provenance {
            periods,
            min_dcb,
            min_uy,
            pieces,
            oracle_calls: stats.calls(),
            oracle_shortcuts: stats.shortcuts(),
            reach: stats.reach(),
        },
    })
}

/// Configurations with a presentation whose basis cannot be decreased.
/// This set is a home-space for every set of configurations.
pub fn ndcbconf(net: &PetriNet, l: &LinearSet, budget: Budget) -> Result<SemilinearSet, WitnessError> {
    let d = net.dim();
    if l.dim() != d {
        return Err(SetError::DimensionMismatch { expected: d, found: l.dim() }.into());
    }
    let l = l.normalized();
    let stats = OracleStats::default();
    let basis = min_dcb(net, l.periods(), budget, &stats)?;
    let boxes = complement_boxes(&basis);
    let pairs = SemilinearSet::from_boxes(d + l.periods().len(), &boxes)?;
    Ok(pairs
        .image_affine(&prmark_matrix(d, l.periods()), &vec![0; d])?
        .simplified())
}
