//! Semilinear sets given by presentations: finite unions of linear sets
//! `{b + u(1)·p_1 + … + u(k)·p_k : u ∈ N^k}`.
//!
//! Operations work on presentations and never enumerate the denoted sets,
//! except for [`SemilinearSet::points_in_box`], which exists for testing
//! and brute-force checking.

mod diophantine;
mod upward;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

pub use diophantine::{
    find_solution, min_solutions, min_solutions_bounded, ConstraintSystem, Row, SearchExhausted,
    Solutions,
};
pub use upward::{complement_boxes, complement_upward, dominates, MinBasis, PartialVector, Slot};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("basis elements are not pairwise incomparable")]
    NotAntichain,
}

fn check_dim(expected: usize, found: usize) -> Result<(), SetError> {
    if expected == found {
        Ok(())
    } else {
        Err(SetError::DimensionMismatch { expected, found })
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearSet {
    base: Vec<u64>,
    periods: Vec<Vec<u64>>,
}

impl LinearSet {
    pub fn new(base: Vec<u64>, periods: Vec<Vec<u64>>) -> Result<Self, SetError> {
        for p in &periods {
            check_dim(base.len(), p.len())?;
        }
        Ok(LinearSet { base, periods })
    }

    pub(crate) fn new_unchecked(base: Vec<u64>, periods: Vec<Vec<u64>>) -> Self {
        debug_assert!(periods.iter().all(|p| p.len() == base.len()));
        LinearSet { base, periods }
    }

    pub fn point(base: Vec<u64>) -> Self {
        LinearSet {
            base,
            periods: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn base(&self) -> &[u64] {
        &self.base
    }

    pub fn periods(&self) -> &[Vec<u64>] {
        &self.periods
    }

    /// Same set with zero and duplicate periods removed, periods sorted.
    pub fn normalized(&self) -> LinearSet {
        let periods: BTreeSet<Vec<u64>> = self
            .periods
            .iter()
            .filter(|p| p.iter().any(|&v| v > 0))
            .cloned()
            .collect();
        LinearSet {
            base: self.base.clone(),
            periods: periods.into_iter().collect(),
        }
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        if x.len() != self.base.len() {
            return false;
        }
        let Some(rest) = sub(x, &self.base) else {
            return false;
        };
        let periods: Vec<&[u64]> = self
            .periods
            .iter()
            .filter(|p| p.iter().any(|&v| v > 0))
            .map(|p| p.as_slice())
            .collect();
        in_monoid(&periods, &rest)
    }

    /// Sufficient syntactic test for `self ⊆ other`: the base of `self`
    /// lies in `other` and each of its periods lies in the period monoid
    /// of `other`.
    pub fn syntactically_within(&self, other: &LinearSet) -> bool {
        if !other.contains(&self.base) {
            return false;
        }
        let monoid: Vec<&[u64]> = other
            .periods
            .iter()
            .filter(|p| p.iter().any(|&v| v > 0))
            .map(|p| p.as_slice())
            .collect();
        self.periods.iter().all(|p| in_monoid(&monoid, p))
    }

    /// `base + Σ u(j)·p_j`.
    pub fn point_at(&self, u: &[u64]) -> Vec<u64> {
        let mut x = self.base.clone();
        for (p, &c) in self.periods.iter().zip(u) {
            for (xi, pi) in x.iter_mut().zip(p) {
                *xi += c * pi;
            }
        }
        x
    }

    fn image(&self, matrix: &[Vec<u64>], offset: &[u64]) -> LinearSet {
        let apply = |v: &[u64]| -> Vec<u64> {
            matrix
                .iter()
                .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
                .collect()
        };
        let base = apply(&self.base)
            .into_iter()
            .zip(offset)
            .map(|(a, b)| a + b)
            .collect();
        LinearSet {
            base,
            periods: self.periods.iter().map(|p| apply(p)).collect(),
        }
        .normalized()
    }
}

impl fmt::Debug for LinearSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L({:?}; {:?})", self.base, self.periods)
    }
}

fn sub(a: &[u64], b: &[u64]) -> Option<Vec<u64>> {
    a.iter().zip(b).map(|(x, y)| x.checked_sub(*y)).collect()
}

/// Whether `target` is a nonnegative integer combination of `periods`
/// (all nonzero). Depth-first over the periods with a memo of failures.
fn in_monoid(periods: &[&[u64]], target: &[u64]) -> bool {
    let n = target.len();
    // support[j][i]: some period at index ≥ j is positive in coordinate i
    let mut support = vec![vec![false; n]; periods.len() + 1];
    for j in (0..periods.len()).rev() {
        for i in 0..n {
            support[j][i] = support[j + 1][i] || periods[j][i] > 0;
        }
    }
    let mut failed: HashSet<(usize, Vec<u64>)> = HashSet::new();
    search(periods, &support, 0, target.to_vec(), &mut failed)
}

fn search(
    periods: &[&[u64]],
    support: &[Vec<bool>],
    j: usize,
    rest: Vec<u64>,
    failed: &mut HashSet<(usize, Vec<u64>)>,
) -> bool {
    if rest.iter().all(|&v| v == 0) {
        return true;
    }
    if j == periods.len() || rest.iter().zip(&support[j]).any(|(&v, &s)| v > 0 && !s) {
        return false;
    }
    if failed.contains(&(j, rest.clone())) {
        return false;
    }
    let p = periods[j];
    let mut cur = rest.clone();
    loop {
        if search(periods, support, j + 1, cur.clone(), failed) {
            return true;
        }
        match sub(&cur, p) {
            Some(next) => cur = next,
            None => break,
        }
    }
    failed.insert((j, rest));
    false
}

/// A finite union of linear sets of one dimension.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SemilinearSet {
    dim: usize,
    components: Vec<LinearSet>,
}

impl SemilinearSet {
    pub fn empty(dim: usize) -> Self {
        SemilinearSet {
            dim,
            components: Vec::new(),
        }
    }

    /// All of `N^dim`.
    pub fn full(dim: usize) -> Self {
        SemilinearSet {
            dim,
            components: vec![PartialVector::omega(dim).instances_of()],
        }
    }

    pub fn from_components(dim: usize, components: Vec<LinearSet>) -> Result<Self, SetError> {
        for c in &components {
            check_dim(dim, c.dim())?;
        }
        Ok(SemilinearSet { dim, components })
    }

    pub(crate) fn from_components_unchecked(dim: usize, components: Vec<LinearSet>) -> Self {
        SemilinearSet { dim, components }
    }

    pub fn from_linear(l: LinearSet) -> Self {
        SemilinearSet {
            dim: l.dim(),
            components: vec![l],
        }
    }

    pub fn from_points(dim: usize, points: impl IntoIterator<Item = Vec<u64>>) -> Result<Self, SetError> {
        let components = points.into_iter().map(LinearSet::point).collect();
        SemilinearSet::from_components(dim, components)
    }

    /// Union of the instance sets of the given boxes.
    pub fn from_boxes(dim: usize, boxes: &[PartialVector]) -> Result<Self, SetError> {
        SemilinearSet::from_components(dim, boxes.iter().map(PartialVector::instances_of).collect())
    }

    /// Solution set of a constraint system, one linear component per
    /// minimal inhomogeneous solution with the Hilbert basis as periods.
    pub fn from_constraints(sys: &ConstraintSystem) -> Self {
        let sols = min_solutions(sys);
        let components = sols
            .inhomogeneous
            .into_iter()
            .map(|b| LinearSet::new_unchecked(b, sols.hilbert.clone()))
            .collect();
        SemilinearSet {
            dim: sys.vars(),
            components,
        }
        .normalized()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[LinearSet] {
        &self.components
    }

    pub fn into_components(self) -> Vec<LinearSet> {
        self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn member(&self, x: &[u64]) -> Result<bool, SetError> {
        check_dim(self.dim, x.len())?;
        Ok(self.components.iter().any(|c| c.contains(x)))
    }

    /// Index of the first component containing `x`.
    pub fn component_containing(&self, x: &[u64]) -> Option<usize> {
        self.components.iter().position(|c| c.contains(x))
    }

    /// Components normalized, sorted and deduplicated.
    pub fn normalized(&self) -> SemilinearSet {
        let set: BTreeSet<LinearSet> = self.components.iter().map(LinearSet::normalized).collect();
        SemilinearSet {
            dim: self.dim,
            components: set.into_iter().collect(),
        }
    }

    /// Normalization plus best-effort removal of components that are
    /// syntactically contained in another component.
    pub fn simplified(&self) -> SemilinearSet {
        let comps = self.normalized().components;
        let mut keep = vec![true; comps.len()];
        // Visit larger-looking components first so they survive.
        let mut order: Vec<usize> = (0..comps.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(comps[i].periods.len()));
        for &i in &order {
            let covered = order
                .iter()
                .any(|&j| j != i && keep[j] && comps[i].syntactically_within(&comps[j]));
            if covered {
                keep[i] = false;
            }
        }
        SemilinearSet {
            dim: self.dim,
            components: comps
                .into_iter()
                .zip(keep)
                .filter_map(|(c, k)| k.then_some(c))
                .collect(),
        }
    }

    pub fn union(&self, other: &SemilinearSet) -> Result<SemilinearSet, SetError> {
        check_dim(self.dim, other.dim)?;
        let mut components = self.components.clone();
        components.extend(other.components.iter().cloned());
        Ok(SemilinearSet {
            dim: self.dim,
            components,
        }
        .normalized())
    }

    /// `{ offset + M·s : s ∈ self }` for a `d × n` matrix of naturals.
    pub fn image_affine(&self, matrix: &[Vec<u64>], offset: &[u64]) -> Result<SemilinearSet, SetError> {
        check_dim(matrix.len(), offset.len())?;
        for row in matrix {
            check_dim(self.dim, row.len())?;
        }
        Ok(SemilinearSet {
            dim: offset.len(),
            components: self.components.iter().map(|c| c.image(matrix, offset)).collect(),
        }
        .normalized())
    }

    pub fn intersect(&self, other: &SemilinearSet) -> Result<SemilinearSet, SetError> {
        check_dim(self.dim, other.dim)?;
        let mut components = Vec::new();
        for a in &self.components {
            for b in &other.components {
                components.extend(intersect_linear(a, b));
            }
        }
        Ok(SemilinearSet {
            dim: self.dim,
            components,
        }
        .normalized())
    }

    /// Members of `self` that satisfy `sys` (a system over the same
    /// coordinates). Each component `b + P·u` is substituted into the
    /// constraints and the resulting system over `u` is solved.
    pub fn restrict(&self, sys: &ConstraintSystem) -> Result<SemilinearSet, SetError> {
        check_dim(self.dim, sys.vars())?;
        let mut components = Vec::new();
        for c in &self.components {
            let k = c.periods.len();
            let substitute = |row: &Row| -> (Vec<i64>, i64) {
                let coeffs = c
                    .periods
                    .iter()
                    .map(|p| row.coeffs.iter().zip(p).map(|(a, &v)| a * v as i64).sum())
                    .collect();
                let at_base: i64 = row.coeffs.iter().zip(&c.base).map(|(a, &v)| a * v as i64).sum();
                (coeffs, row.rhs - at_base)
            };
            let mut local = ConstraintSystem::new(k);
            for row in sys.equalities() {
                let (coeffs, rhs) = substitute(row);
                local.push_eq(coeffs, rhs);
            }
            for row in sys.inequalities() {
                let (coeffs, rhs) = substitute(row);
                local.push_geq(coeffs, rhs);
            }
            if local.trivially_infeasible() {
                continue;
            }
            let sols = min_solutions(&local);
            let periods: Vec<Vec<u64>> = sols.hilbert.iter().map(|h| c.point_at_periods(h)).collect();
            for u in &sols.inhomogeneous {
                components.push(LinearSet::new_unchecked(c.point_at(u), periods.clone()));
            }
        }
        Ok(SemilinearSet {
            dim: self.dim,
            components,
        }
        .normalized())
    }

    /// Cartesian product with a single point prepended: `{(y, s) : s ∈ self}`.
    pub fn prefixed_by(&self, y: &[u64]) -> SemilinearSet {
        let widen = |v: &[u64], head: &[u64]| -> Vec<u64> { head.iter().chain(v).copied().collect() };
        let zeros = vec![0; y.len()];
        SemilinearSet {
            dim: self.dim + y.len(),
            components: self
                .components
                .iter()
                .map(|c| LinearSet {
                    base: widen(&c.base, y),
                    periods: c.periods.iter().map(|p| widen(p, &zeros)).collect(),
                })
                .collect(),
        }
    }

    /// All members with every coordinate ≤ `bound`, in lexicographic order.
    pub fn points_in_box(&self, bound: u64) -> Vec<Vec<u64>> {
        box_points(self.dim, bound)
            .filter(|x| self.components.iter().any(|c| c.contains(x)))
            .collect()
    }

    /// Some member, if the set is nonempty.
    pub fn some_member(&self) -> Option<Vec<u64>> {
        self.components.first().map(|c| c.base.clone())
    }
}

impl LinearSet {
    fn point_at_periods(&self, u: &[u64]) -> Vec<u64> {
        let mut x = vec![0; self.base.len()];
        for (p, &c) in self.periods.iter().zip(u) {
            for (xi, pi) in x.iter_mut().zip(p) {
                *xi += c * pi;
            }
        }
        x
    }
}

fn intersect_linear(a: &LinearSet, b: &LinearSet) -> Vec<LinearSet> {
    let (ka, kb) = (a.periods.len(), b.periods.len());
    let mut sys = ConstraintSystem::new(ka + kb);
    for i in 0..a.dim() {
        let coeffs = a
            .periods
            .iter()
            .map(|p| p[i] as i64)
            .chain(b.periods.iter().map(|p| -(p[i] as i64)))
            .collect();
        sys.push_eq(coeffs, b.base[i] as i64 - a.base[i] as i64);
    }
    if sys.trivially_infeasible() {
        return Vec::new();
    }
    let sols = min_solutions(&sys);
    let periods: Vec<Vec<u64>> = sols.hilbert.iter().map(|h| a.point_at_periods(&h[..ka])).collect();
    sols.inhomogeneous
        .iter()
        .map(|s| LinearSet::new_unchecked(a.point_at(&s[..ka]), periods.clone()))
        .collect()
}

/// Every vector of length `dim` with entries in `0..=bound`, lexicographically.
pub fn box_points(dim: usize, bound: u64) -> impl Iterator<Item = Vec<u64>> {
    let mut next = Some(vec![0u64; dim]);
    std::iter::from_fn(move || {
        let cur = next.take()?;
        let mut succ = cur.clone();
        let mut i = dim;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if succ[i] < bound {
                succ[i] += 1;
                next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(cur)
    })
}

/// All vectors of length `dim` whose entries sum to at most `max_norm`.
pub fn vectors_up_to_norm(dim: usize, max_norm: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = vec![0u64; dim];
    fn rec(i: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[i] = v;
            rec(i + 1, left - v, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, max_norm, &mut cur, &mut out);
    out
}

impl fmt::Debug for SemilinearSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(&self.components).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lin(base: &[u64], periods: &[&[u64]]) -> LinearSet {
        LinearSet::new(base.to_vec(), periods.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    #[test]
    fn membership_examples() {
        let s = SemilinearSet::from_linear(lin(&[1, 1], &[&[1, 0]]));
        assert!(s.member(&[3, 1]).unwrap());
        assert!(!s.member(&[0, 5]).unwrap());
        assert!(!SemilinearSet::empty(2).member(&[0, 0]).unwrap());
        assert!(matches!(
            s.member(&[1]),
            Err(SetError::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn monoid_search_handles_zero_periods_and_parity() {
        let l = lin(&[0, 0], &[&[0, 0], &[2, 2]]);
        assert!(l.contains(&[4, 4]));
        assert!(!l.contains(&[3, 3]));
        let l = lin(&[0], &[&[3], &[5]]);
        assert!(l.contains(&[8]));
        assert!(!l.contains(&[7]));
    }

    #[test]
    fn union_counts_and_identity() {
        let s = SemilinearSet::from_linear(lin(&[0, 0], &[]));
        let t = SemilinearSet::from_components(2, vec![lin(&[1, 0], &[]), lin(&[0, 1], &[&[1, 1]])]).unwrap();
        assert_eq!(s.union(&t).unwrap().components().len(), 3);
        assert_eq!(s.union(&SemilinearSet::empty(2)).unwrap(), s.normalized());
    }

    #[test]
    fn affine_image_examples() {
        let s = SemilinearSet::from_linear(lin(&[1, 0], &[&[0, 1]]));
        let id = vec![vec![1, 0], vec![0, 1]];
        assert_eq!(s.image_affine(&id, &[0, 0]).unwrap(), s.normalized());
        let img = s.image_affine(&[vec![1, 2]], &[0]).unwrap();
        assert_eq!(img.components(), &[lin(&[1], &[&[2]])]);
    }

    #[test]
    fn constraint_examples() {
        let s = SemilinearSet::from_constraints(&ConstraintSystem::new(2).leq(vec![1, 0], 0));
        assert_eq!(s.components(), &[lin(&[0, 0], &[&[0, 1]])]);
        let s = SemilinearSet::from_constraints(&ConstraintSystem::new(1).geq(vec![1], 1).leq(vec![1], 0));
        assert!(s.is_empty());
        let s = SemilinearSet::from_constraints(&ConstraintSystem::new(2).geq(vec![1, 1], 2));
        for x in box_points(2, 10) {
            assert_eq!(s.member(&x).unwrap(), x[0] + x[1] >= 2);
        }
    }

    #[test]
    fn intersection_examples() {
        let diag = SemilinearSet::from_linear(lin(&[0, 0], &[&[1, 1]]));
        let axis = SemilinearSet::from_constraints(&ConstraintSystem::new(2).leq(vec![1, 0], 0));
        let i = diag.intersect(&axis).unwrap();
        assert_eq!(i.components(), &[lin(&[0, 0], &[])]);
        assert!(diag.intersect(&SemilinearSet::empty(2)).unwrap().is_empty());
        let s = SemilinearSet::from_components(2, vec![lin(&[1, 0], &[&[2, 1]]), lin(&[0, 3], &[&[1, 0]])]).unwrap();
        let ss = s.intersect(&s).unwrap();
        for x in box_points(2, 10) {
            assert_eq!(ss.member(&x).unwrap(), s.member(&x).unwrap());
        }
    }

    #[test]
    fn restrict_agrees_with_filter() {
        let s = SemilinearSet::from_components(2, vec![lin(&[1, 0], &[&[1, 1]]), lin(&[0, 2], &[&[0, 1], &[2, 0]])]).unwrap();
        let sys = ConstraintSystem::new(2).geq(vec![1, 1], 4);
        let r = s.restrict(&sys).unwrap();
        for x in box_points(2, 10) {
            assert_eq!(r.member(&x).unwrap(), s.member(&x).unwrap() && x[0] + x[1] >= 4, "{x:?}");
        }
    }

    #[test]
    fn simplification_drops_contained_components() {
        let s = SemilinearSet::from_components(2, vec![lin(&[2, 2], &[&[2, 0]]), lin(&[0, 0], &[&[1, 0], &[0, 1]])]).unwrap();
        let simple = s.simplified();
        assert_eq!(simple.components().len(), 1);
        for x in box_points(2, 8) {
            assert_eq!(simple.member(&x).unwrap(), s.member(&x).unwrap());
        }
    }

    #[test]
    fn helpers() {
        assert_eq!(box_points(2, 1).collect::<Vec<_>>(), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(vectors_up_to_norm(2, 1), vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
        let s = SemilinearSet::from_linear(lin(&[1], &[&[1]])).prefixed_by(&[4, 5]);
        assert!(s.member(&[4, 5, 3]).unwrap());
        assert!(!s.member(&[4, 4, 3]).unwrap());
    }
}
