//! Partial vectors, finite antichain bases of upward-closed sets, and the
//! complement of an upward-closed set as a union of boxes.

use std::collections::BTreeSet;
use std::fmt;

use super::{LinearSet, SemilinearSet, SetError};

/// One entry of a [`PartialVector`]. `Fixed` orders before `Omega`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Fixed(u64),
    Omega,
}

/// A vector in which some coordinates are left unspecified (`ω`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialVector(Vec<Slot>);

impl PartialVector {
    pub fn new(slots: Vec<Slot>) -> Self {
        PartialVector(slots)
    }

    pub fn concrete(v: &[u64]) -> Self {
        PartialVector(v.iter().map(|&x| Slot::Fixed(x)).collect())
    }

    /// All coordinates unspecified.
    pub fn omega(n: usize) -> Self {
        PartialVector(vec![Slot::Omega; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.0
    }

    pub fn is_concrete(&self) -> bool {
        self.0.iter().all(|s| matches!(s, Slot::Fixed(_)))
    }

    pub fn omega_positions(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] == Slot::Omega).collect()
    }

    /// The vector with every `ω` replaced by `n`.
    pub fn instantiate(&self, n: u64) -> Vec<u64> {
        self.0
            .iter()
            .map(|s| match s {
                Slot::Fixed(v) => *v,
                Slot::Omega => n,
            })
            .collect()
    }

    /// The smallest instance (`ω` replaced by 0).
    pub fn fixed_part(&self) -> Vec<u64> {
        self.instantiate(0)
    }

    pub fn has_instance(&self, x: &[u64]) -> bool {
        x.len() == self.0.len()
            && self.0.iter().zip(x).all(|(s, &v)| match s {
                Slot::Fixed(f) => *f == v,
                Slot::Omega => true,
            })
    }

    /// Every instance of `other` is an instance of `self`.
    pub fn subsumes(&self, other: &PartialVector) -> bool {
        self.0.len() == other.0.len()
            && self.0.iter().zip(&other.0).all(|(a, b)| match (a, b) {
                (Slot::Omega, _) => true,
                (Slot::Fixed(x), Slot::Fixed(y)) => x == y,
                (Slot::Fixed(_), Slot::Omega) => false,
            })
    }

    /// Instances common to both, if any.
    pub fn meet(&self, other: &PartialVector) -> Option<PartialVector> {
        if self.0.len() != other.0.len() {
            return None;
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| match (a, b) {
                (Slot::Omega, s) | (s, Slot::Omega) => Some(*s),
                (Slot::Fixed(x), Slot::Fixed(y)) if x == y => Some(*a),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(PartialVector)
    }

    /// `self` with coordinate `i` replaced.
    pub fn with(&self, i: usize, slot: Slot) -> PartialVector {
        let mut v = self.0.clone();
        v[i] = slot;
        PartialVector(v)
    }

    /// The instances as a linear set: one unit period per `ω` coordinate.
    pub fn instances_of(&self) -> LinearSet {
        let n = self.0.len();
        let periods = self
            .omega_positions()
            .into_iter()
            .map(|i| {
                let mut p = vec![0; n];
                p[i] = 1;
                p
            })
            .collect();
        LinearSet::new_unchecked(self.fixed_part(), periods)
    }
}

impl fmt::Debug for PartialVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PartialVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            match s {
                Slot::Fixed(v) => write!(f, "{v}")?,
                Slot::Omega => write!(f, "ω")?,
            }
        }
        write!(f, ")")
    }
}

pub fn dominates(a: &[u64], b: &[u64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x >= y)
}

/// Finite antichain presenting the upward-closed set it generates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MinBasis {
    dim: usize,
    elements: Vec<Vec<u64>>,
}

impl MinBasis {
    pub fn empty(dim: usize) -> Self {
        MinBasis {
            dim,
            elements: Vec::new(),
        }
    }

    /// Checks the antichain property; elements are stored sorted.
    pub fn new(dim: usize, elements: Vec<Vec<u64>>) -> Result<Self, SetError> {
        for e in &elements {
            if e.len() != dim {
                return Err(SetError::DimensionMismatch {
                    expected: dim,
                    found: e.len(),
                });
            }
        }
        for (i, a) in elements.iter().enumerate() {
            for b in &elements[i + 1..] {
                if dominates(a, b) || dominates(b, a) {
                    return Err(SetError::NotAntichain);
                }
            }
        }
        let mut elements = elements;
        elements.sort();
        Ok(MinBasis { dim, elements })
    }

    /// Keeps only the minimal elements of `candidates`.
    pub fn minimal_of(dim: usize, candidates: impl IntoIterator<Item = Vec<u64>>) -> Self {
        let set: BTreeSet<Vec<u64>> = candidates.into_iter().collect();
        let all: Vec<_> = set.into_iter().collect();
        let elements = all
            .iter()
            .filter(|e| !all.iter().any(|o| o != *e && dominates(e, o)))
            .cloned()
            .collect();
        MinBasis { dim, elements }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[Vec<u64>] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Membership in the generated upward-closed set.
    pub fn covers(&self, x: &[u64]) -> bool {
        self.elements.iter().any(|m| dominates(x, m))
    }

    pub fn insert(&mut self, x: Vec<u64>) -> Result<(), SetError> {
        if self.elements.iter().any(|m| dominates(m, &x) || dominates(&x, m)) {
            return Err(SetError::NotAntichain);
        }
        let pos = self.elements.binary_search(&x).unwrap_or_else(|p| p);
        self.elements.insert(pos, x);
        Ok(())
    }
}

/// Boxes whose union is `N^n ∖ ↑basis`, in lexicographic order.
///
/// For each choice of a coordinate `i` with `m(i) ≥ 1` per basis element
/// `m`, the box `{x : x(i) < m(i)}` excludes `m`; bounded coordinates are
/// enumerated, unbounded ones become `ω`.
pub fn complement_boxes(basis: &MinBasis) -> Vec<PartialVector> {
    let n = basis.dim;
    let mut bounds: BTreeSet<Vec<Option<u64>>> = BTreeSet::new();
    let mut current = vec![None; n];
    choose_bounds(basis.elements(), 0, &mut current, &mut bounds);

    // Drop bound vectors whose box is contained in another's.
    let bounds: Vec<_> = bounds.into_iter().collect();
    let within = |a: &Vec<Option<u64>>, b: &Vec<Option<u64>>| {
        a.iter().zip(b).all(|(x, y)| match (x, y) {
            (_, None) => true,
            (Some(x), Some(y)) => x <= y,
            (None, Some(_)) => false,
        })
    };
    let maximal: Vec<_> = bounds
        .iter()
        .filter(|a| !bounds.iter().any(|b| b != *a && within(a, b)))
        .collect();

    let mut boxes: BTreeSet<PartialVector> = BTreeSet::new();
    for ub in maximal {
        let mut slots = vec![Slot::Omega; n];
        expand(ub, 0, &mut slots, &mut boxes);
    }
    let boxes: Vec<_> = boxes.into_iter().collect();
    boxes
        .iter()
        .filter(|b| !boxes.iter().any(|o| o != *b && o.subsumes(b)))
        .cloned()
        .collect()
}

fn choose_bounds(
    elements: &[Vec<u64>],
    idx: usize,
    current: &mut Vec<Option<u64>>,
    out: &mut BTreeSet<Vec<Option<u64>>>,
) {
    let Some(m) = elements.get(idx) else {
        out.insert(current.clone());
        return;
    };
    let excluded = m
        .iter()
        .zip(current.iter())
        .any(|(&mv, ub)| matches!(ub, Some(u) if *u < mv));
    if excluded {
        choose_bounds(elements, idx + 1, current, out);
        return;
    }
    for i in 0..m.len() {
        if m[i] == 0 {
            continue;
        }
        let saved = current[i];
        let bound = m[i] - 1;
        current[i] = Some(saved.map_or(bound, |s| s.min(bound)));
        choose_bounds(elements, idx + 1, current, out);
        current[i] = saved;
    }
}

fn expand(ub: &[Option<u64>], i: usize, slots: &mut Vec<Slot>, out: &mut BTreeSet<PartialVector>) {
    if i == ub.len() {
        out.insert(PartialVector(slots.clone()));
        return;
    }
    match ub[i] {
        None => {
            slots[i] = Slot::Omega;
            expand(ub, i + 1, slots, out);
        }
        Some(u) => {
            for v in 0..=u {
                slots[i] = Slot::Fixed(v);
                expand(ub, i + 1, slots, out);
            }
        }
    }
}

/// `N^n ∖ ↑basis` as a semilinear set.
pub fn complement_upward(basis: &MinBasis) -> SemilinearSet {
    let components = complement_boxes(basis)
        .iter()
        .map(PartialVector::instances_of)
        .collect();
    SemilinearSet::from_components_unchecked(basis.dim, components)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dickson_boxes_for_single_element() {
        let b = MinBasis::new(2, vec![vec![1, 1]]).unwrap();
        let boxes = complement_boxes(&b);
        assert_eq!(
            boxes,
            vec![
                PartialVector::new(vec![Slot::Fixed(0), Slot::Omega]),
                PartialVector::new(vec![Slot::Omega, Slot::Fixed(0)]),
            ]
        );
    }

    #[test]
    fn empty_and_zero_basis() {
        let all = complement_upward(&MinBasis::empty(3));
        assert_eq!(all.components().len(), 1);
        assert!(all.member(&[5, 0, 9]).unwrap());
        let none = complement_upward(&MinBasis::new(3, vec![vec![0, 0, 0]]).unwrap());
        assert!(none.is_empty());
    }

    #[test]
    fn antichain_is_checked() {
        assert_eq!(
            MinBasis::new(2, vec![vec![1, 1], vec![2, 1]]),
            Err(SetError::NotAntichain)
        );
        let mut b = MinBasis::new(2, vec![vec![2, 0]]).unwrap();
        assert_eq!(b.insert(vec![3, 0]), Err(SetError::NotAntichain));
        b.insert(vec![0, 1]).unwrap();
        assert_eq!(b.elements(), &[vec![0, 1], vec![2, 0]]);
    }

    #[test]
    fn complement_partitions_small_grid() {
        let b = MinBasis::new(3, vec![vec![2, 0, 1], vec![0, 3, 0], vec![1, 1, 2]]).unwrap();
        let c = complement_upward(&b);
        for x in 0..6 {
            for y in 0..6 {
                for z in 0..6 {
                    let v = [x, y, z];
                    assert_ne!(c.member(&v).unwrap(), b.covers(&v), "{v:?}");
                }
            }
        }
    }

    #[test]
    fn partial_vector_instances() {
        let v = PartialVector::new(vec![Slot::Omega, Slot::Fixed(1)]);
        let l = v.instances_of();
        assert_eq!(l.base(), &[0, 1]);
        assert_eq!(l.periods(), &[vec![1, 0]]);
        let l = PartialVector::concrete(&[2, 3]).instances_of();
        assert!(l.periods().is_empty());
        assert_eq!(PartialVector::omega(2).instances_of().periods().len(), 2);
        assert_eq!(v.to_string(), "(ω,1)");
    }

    #[test]
    fn meet_and_subsume() {
        let a = PartialVector::new(vec![Slot::Omega, Slot::Fixed(1)]);
        let b = PartialVector::new(vec![Slot::Fixed(2), Slot::Omega]);
        assert_eq!(a.meet(&b), Some(PartialVector::concrete(&[2, 1])));
        assert!(a.subsumes(&PartialVector::concrete(&[7, 1])));
        assert!(!a.subsumes(&b));
        assert_eq!(a.meet(&PartialVector::concrete(&[0, 0])), None);
    }
}
