//! Reduction of a linear-to-linear reachability question to a single
//! configuration-to-configuration question on an augmented net.

use crate::net::{Configuration, PetriNet, Trace};
use crate::semilinear::{LinearSet, SetError};

/// Single-pair reachability instance: `final_config` is reachable from
/// `initial` in `net` iff some member of the source linear set reaches some
/// member of the target linear set in the original net.
///
/// Places are the `d` original ones followed by the control places
/// `c_src`, `c_run`, `c_tgt`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairInstance {
    pub net: PetriNet,
    pub initial: Configuration,
    pub final_config: Configuration,
    layout: Layout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Layout {
    dim: usize,
    pumps: usize,
    originals: usize,
    drains: usize,
}

/// A decoded witness: the source member, the reached target member and the
/// original-net action sequence between them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedRun {
    pub from: Configuration,
    pub steps: Vec<usize>,
    pub to: Configuration,
}

pub fn reduce_to_pair(net: &PetriNet, src: &LinearSet, tgt: &LinearSet) -> Result<PairInstance, SetError> {
    let d = net.dim();
    for found in [src.dim(), tgt.dim()] {
        if found != d {
            return Err(SetError::DimensionMismatch { expected: d, found });
        }
    }
    let (c_src, c_run, c_tgt) = (d, d + 1, d + 2);
    let width = d + 3;
    let lift = |v: &[u64], extra: &[usize]| -> Vec<u64> {
        let mut out = v.to_vec();
        out.resize(width, 0);
        for &p in extra {
            out[p] += 1;
        }
        out
    };
    let zero = vec![0u64; d];
    let mut aug = PetriNet::new(width).expect("width is positive");
    let add = |aug: &mut PetriNet, name: String, pre: Vec<u64>, post: Vec<u64>| {
        aug.add_named_action(name, pre, post)
            .expect("augmented actions are well-formed and uniquely named");
    };
    for (j, p) in src.periods().iter().enumerate() {
        add(&mut aug, format!("pump.{j}"), lift(&zero, &[c_src]), lift(p, &[c_src]));
    }
    add(&mut aug, "start".into(), lift(&zero, &[c_src]), lift(src.base(), &[c_run]));
    for a in net.actions() {
        add(&mut aug, format!("run.{}", a.name), lift(&a.pre, &[c_run]), lift(&a.post, &[c_run]));
    }
    add(&mut aug, "switch".into(), lift(tgt.base(), &[c_run]), lift(&zero, &[c_tgt]));
    for (j, p) in tgt.periods().iter().enumerate() {
        add(&mut aug, format!("drain.{j}"), lift(p, &[c_tgt]), lift(&zero, &[c_tgt]));
    }
    Ok(PairInstance {
        net: aug,
        initial: Configuration::new(lift(&zero, &[c_src])),
        final_config: Configuration::new(lift(&zero, &[c_tgt])),
        layout: Layout {
            dim: d,
            pumps: src.periods().len(),
            originals: net.actions().len(),
            drains: tgt.periods().len(),
        },
    })
}

impl PairInstance {
    pub fn original_dim(&self) -> usize {
        self.layout.dim
    }

    /// Index of the action moving control from the run phase to the
    /// target phase.
    pub fn switch_action(&self) -> usize {
        self.layout.pumps + 1 + self.layout.originals
    }

    fn start_action(&self) -> usize {
        self.layout.pumps
    }

    /// Recovers the original-net run from a trace of the augmented net
    /// that starts at `initial`.
    pub fn decode(&self, trace: &Trace) -> Option<DecodedRun> {
        let d = self.layout.dim;
        let start = self.start_action();
        let switch = self.switch_action();
        let replay = self.net.fire_sequence(&trace.start, &trace.steps).ok()?;
        debug_assert_eq!(replay.end, trace.end);
        let mut cur = trace.start.clone();
        let mut from = None;
        let mut to = None;
        let mut steps = Vec::new();
        for &s in &trace.steps {
            if s == switch {
                to = Some(Configuration::from(&cur[..d]));
            }
            cur = self.net.fire(&cur, s).ok()?;
            if s == start {
                from = Some(Configuration::from(&cur[..d]));
            } else if s > start && s < switch {
                steps.push(s - start - 1);
            }
        }
        Some(DecodedRun {
            from: from?,
            steps,
            to: to?,
        })
    }

    pub fn action_count_breakdown(&self) -> (usize, usize, usize) {
        (self.layout.pumps, self.layout.originals, self.layout.drains)
    }
}
