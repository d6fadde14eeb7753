//! Minimal bases of upward-closed sets from a partial-vector oracle.
//!
//! Given an oracle that tells whether a [`PartialVector`] has an instance in
//! an (implicit) upward-closed set `U`, [`min_basis`] computes the finite
//! set of minimal elements of `U`:
//!
//! 1. start with `B = ∅`;
//! 2. split the complement of `↑B` into boxes and query them in
//!    lexicographic order;
//! 3. for the first box that answers yes, raise all of its `ω` coordinates
//!    together (0, 1, 2, …) until the concrete point is in `U`;
//! 4. descend that point to a minimal element and add it to `B`;
//! 5. stop when every complement box answers no.
//!
//! Dickson's lemma bounds the number of rounds when the oracle is total.

use std::collections::HashMap;
use std::sync::Mutex;

use thiserror::Error;

use crate::semilinear::{complement_boxes, MinBasis, PartialVector, Slot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

/// Answers "does `v` have an instance in `U`?" for a fixed upward-closed `U`.
///
/// Implementations must be monotone: raising a concrete coordinate of a
/// yes-instance, or replacing it by `ω`, keeps the answer yes.
pub trait UpwardOracle {
    fn dim(&self) -> usize;
    fn query(&self, v: &PartialVector) -> Answer;
}

impl<O: UpwardOracle + ?Sized> UpwardOracle for &O {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn query(&self, v: &PartialVector) -> Answer {
        (**self).query(v)
    }
}

/// Oracle backed by a closure.
pub struct FnOracle<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&PartialVector) -> Answer> FnOracle<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnOracle { dim, f }
    }
}

impl<F: Fn(&PartialVector) -> Answer> UpwardOracle for FnOracle<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn query(&self, v: &PartialVector) -> Answer {
        (self.f)(v)
    }
}

/// Caches answers by partial vector. Unknown answers are cached too, so a
/// query that failed once fails fast afterwards.
pub struct Memoized<O> {
    inner: O,
    cache: Mutex<HashMap<PartialVector, Answer>>,
}

impl<O: UpwardOracle> Memoized<O> {
    pub fn new(inner: O) -> Self {
        Memoized {
            inner,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    /// Distinct queries forwarded to the inner oracle.
    pub fn distinct_queries(&self) -> usize {
        self.cache.lock().expect("cache lock").len()
    }

    /// Snapshot of all cached answers, sorted by query.
    pub fn answered(&self) -> Vec<(PartialVector, Answer)> {
        let mut v: Vec<_> = self
            .cache
            .lock()
            .expect("cache lock")
            .iter()
            .map(|(k, a)| (k.clone(), *a))
            .collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }
}

impl<O: UpwardOracle> UpwardOracle for Memoized<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn query(&self, v: &PartialVector) -> Answer {
        if let Some(a) = self.cache.lock().expect("cache lock").get(v) {
            return *a;
        }
        let a = self.inner.query(v);
        self.cache.lock().expect("cache lock").insert(v.clone(), a);
        a
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VjError {
    #[error("oracle could not decide {0}")]
    Inconclusive(PartialVector),
    /// A box answered yes but no diagonal point up to the cap did.
    #[error("oracle answered yes on {0} but no instance up to the diagonal cap")]
    InconsistentOracle(PartialVector),
}

/// Largest diagonal value tried before declaring the oracle inconsistent.
pub const DIAGONAL_CAP: u64 = 4096;

pub fn min_basis(oracle: &impl UpwardOracle) -> Result<MinBasis, VjError> {
    let n = oracle.dim();
    let mut basis = MinBasis::empty(n);
    loop {
        let mut hit = None;
        for b in complement_boxes(&basis) {
            match oracle.query(&b) {
                Answer::Yes => {
                    hit = Some(b);
                    break;
                }
                Answer::No => {}
                Answer::Unknown => return Err(VjError::Inconclusive(b)),
            }
        }
        let Some(found_box) = hit else {
            return Ok(basis);
        };
        let point = diagonal_member(oracle, &found_box)?;
        let m = minimize(&point, |x| oracle.query(&PartialVector::concrete(x)))?;
        basis
            .insert(m)
            .expect("a minimal element outside ↑B is incomparable with B");
    }
}

fn diagonal_member(oracle: &impl UpwardOracle, b: &PartialVector) -> Result<Vec<u64>, VjError> {
    if b.is_concrete() {
        return Ok(b.fixed_part());
    }
    for level in 0..=DIAGONAL_CAP {
        let x = b.instantiate(level);
        let q = PartialVector::concrete(&x);
        match oracle.query(&q) {
            Answer::Yes => return Ok(x),
            Answer::No => {}
            Answer::Unknown => return Err(VjError::Inconclusive(q)),
        }
    }
    Err(VjError::InconsistentOracle(b.clone()))
}

/// Descends `x` (a member of `U`) to a minimal element of `U` below it,
/// binary-searching each coordinate in increasing index order.
pub fn minimize(x: &[u64], membership: impl Fn(&[u64]) -> Answer) -> Result<Vec<u64>, VjError> {
    let mut cur = x.to_vec();
    for i in 0..cur.len() {
        // invariant: membership(cur with cur[i] = hi) is yes
        let (mut lo, mut hi) = (0u64, cur[i]);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            let mut probe = cur.clone();
            probe[i] = mid;
            match membership(&probe) {
                Answer::Yes => hi = mid,
                Answer::No => lo = mid + 1,
                Answer::Unknown => return Err(VjError::Inconclusive(PartialVector::concrete(&probe))),
            }
        }
        cur[i] = hi;
    }
    Ok(cur)
}

/// Oracle for an explicitly given upward-closed set `↑basis`.
pub fn basis_oracle(basis: &MinBasis) -> impl UpwardOracle + '_ {
    FnOracle::new(basis.dim(), move |v: &PartialVector| {
        let hit = basis.elements().iter().any(|m| {
            v.slots().iter().zip(m).all(|(s, &mv)| match s {
                Slot::Omega => true,
                Slot::Fixed(x) => *x >= mv,
            })
        });
        if hit {
            Answer::Yes
        } else {
            Answer::No
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semilinear::box_points;
    use std::cell::Cell;

    fn brute_minimal(basis: &MinBasis, bound: u64) -> Vec<Vec<u64>> {
        let members: Vec<_> = box_points(basis.dim(), bound).filter(|x| basis.covers(x)).collect();
        MinBasis::minimal_of(basis.dim(), members).elements().to_vec()
    }

    #[test]
    fn recovers_single_element() {
        let target = MinBasis::new(2, vec![vec![1, 1]]).unwrap();
        let got = min_basis(&basis_oracle(&target)).unwrap();
        assert_eq!(got.elements(), brute_minimal(&target, 8).as_slice());
        assert_eq!(got.elements(), &[vec![1, 1]]);
    }

    #[test]
    fn empty_and_full() {
        let none = FnOracle::new(2, |_: &PartialVector| Answer::No);
        assert!(min_basis(&none).unwrap().is_empty());
        let all = FnOracle::new(3, |_: &PartialVector| Answer::Yes);
        assert_eq!(min_basis(&all).unwrap().elements(), &[vec![0, 0, 0]]);
    }

    #[test]
    fn recovers_larger_antichains() {
        let target = MinBasis::new(3, vec![vec![3, 0, 1], vec![0, 2, 2], vec![1, 1, 0], vec![0, 5, 0]]).unwrap();
        let memo = Memoized::new(basis_oracle(&target));
        let got = min_basis(&memo).unwrap();
        assert_eq!(got.elements(), brute_minimal(&target, 8).as_slice());
        assert!(memo.distinct_queries() > 0);
    }

    #[test]
    fn unknown_is_reported() {
        let o = FnOracle::new(2, |v: &PartialVector| {
            if v.is_concrete() {
                Answer::Unknown
            } else {
                Answer::Yes
            }
        });
        assert!(matches!(min_basis(&o), Err(VjError::Inconclusive(q)) if q.is_concrete()));
    }

    #[test]
    fn minimize_examples() {
        let target = MinBasis::new(2, vec![vec![1, 1]]).unwrap();
        let member = |x: &[u64]| if target.covers(x) { Answer::Yes } else { Answer::No };
        assert_eq!(minimize(&[3, 2], member).unwrap(), vec![1, 1]);
        assert_eq!(minimize(&[1, 1], member).unwrap(), vec![1, 1]);
        assert_eq!(minimize(&[5], |_| Answer::Yes).unwrap(), vec![0]);
    }

    #[test]
    fn minimize_uses_binary_search() {
        let calls = Cell::new(0);
        let member = |x: &[u64]| {
            calls.set(calls.get() + 1);
            if x[0] >= 700 {
                Answer::Yes
            } else {
                Answer::No
            }
        };
        assert_eq!(minimize(&[1000], member).unwrap(), vec![700]);
        assert!(calls.get() <= 11);
    }
}
