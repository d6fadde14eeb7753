//! Minimal nonnegative solutions of linear Diophantine systems.
//!
//! Uses the Contejean–Devie completion procedure: candidates grow one unit
//! vector at a time, and `x + e_j` is only explored when
//! `<A·x, A·e_j> < 0`, i.e. when the step moves `A·x` towards the origin.
//! Candidates that dominate an already found solution are discarded.
//! Inhomogeneous systems `A·x = c` are handled through an extra variable
//! `x0` with column `-c` that is never raised above 1.

use std::collections::HashSet;

use thiserror::Error;

/// A linear row `coeffs · x (= or ≥) rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Row {
    pub coeffs: Vec<i64>,
    pub rhs: i64,
}

/// Equalities and inequalities over nonnegative integer unknowns.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConstraintSystem {
    vars: usize,
    eqs: Vec<Row>,
    geqs: Vec<Row>,
}

impl ConstraintSystem {
    pub fn new(vars: usize) -> Self {
        ConstraintSystem {
            vars,
            eqs: Vec::new(),
            geqs: Vec::new(),
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn equalities(&self) -> &[Row] {
        &self.eqs
    }

    pub fn inequalities(&self) -> &[Row] {
        &self.geqs
    }

    /// Adds `coeffs · x = rhs`.
    pub fn eq(mut self, coeffs: Vec<i64>, rhs: i64) -> Self {
        self.push_eq(coeffs, rhs);
        self
    }

    /// Adds `coeffs · x ≥ rhs`.
    pub fn geq(mut self, coeffs: Vec<i64>, rhs: i64) -> Self {
        self.push_geq(coeffs, rhs);
        self
    }

    /// Adds `coeffs · x ≤ rhs`.
    pub fn leq(self, coeffs: Vec<i64>, rhs: i64) -> Self {
        self.geq(coeffs.into_iter().map(|c| -c).collect(), -rhs)
    }

    pub fn push_eq(&mut self, coeffs: Vec<i64>, rhs: i64) {
        assert_eq!(coeffs.len(), self.vars, "row length must equal the variable count");
        self.eqs.push(Row { coeffs, rhs });
    }

    pub fn push_geq(&mut self, coeffs: Vec<i64>, rhs: i64) {
        assert_eq!(coeffs.len(), self.vars, "row length must equal the variable count");
        self.geqs.push(Row { coeffs, rhs });
    }

    pub fn is_satisfied_by(&self, x: &[u64]) -> bool {
        let eval = |r: &Row| -> i128 {
            r.coeffs
                .iter()
                .zip(x)
                .map(|(&a, &v)| a as i128 * v as i128)
                .sum()
        };
        x.len() == self.vars
            && self.eqs.iter().all(|r| eval(r) == r.rhs as i128)
            && self.geqs.iter().all(|r| eval(r) >= r.rhs as i128)
    }

    /// Cheap syntactic refutation: some row cannot be met by any
    /// nonnegative assignment because of the signs of its coefficients.
    pub fn trivially_infeasible(&self) -> bool {
        let eq_bad = self.eqs.iter().any(|r| {
            (r.coeffs.iter().all(|&c| c >= 0) && r.rhs < 0)
                || (r.coeffs.iter().all(|&c| c <= 0) && r.rhs > 0)
        });
        let geq_bad = self
            .geqs
            .iter()
            .any(|r| r.coeffs.iter().all(|&c| c <= 0) && r.rhs > 0);
        eq_bad || geq_bad
    }
}

/// Generators of the solution set: every solution is an inhomogeneous
/// minimal solution plus a nonnegative combination of Hilbert basis vectors.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Solutions {
    pub inhomogeneous: Vec<Vec<u64>>,
    pub hilbert: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("completion procedure exceeded its limit of {limit} candidates")]
pub struct SearchExhausted {
    pub limit: usize,
}

/// Minimal solutions and Hilbert basis, without a work limit.
pub fn min_solutions(sys: &ConstraintSystem) -> Solutions {
    min_solutions_bounded(sys, usize::MAX).expect("unbounded search cannot exhaust")
}

pub fn min_solutions_bounded(sys: &ConstraintSystem, limit: usize) -> Result<Solutions, SearchExhausted> {
    let ext = Extended::new(sys);
    let mut out = Solutions::default();
    ext.complete(limit, |x| {
        let (inhom, proj) = ext.project(x);
        if inhom {
            out.inhomogeneous.push(proj);
        } else {
            out.hilbert.push(proj);
        }
        false
    })?;
    out.inhomogeneous.sort();
    out.inhomogeneous.dedup();
    out.hilbert.sort();
    out.hilbert.dedup();
    Ok(out)
}

/// Finds some solution, or proves there is none.
pub fn find_solution(sys: &ConstraintSystem, limit: usize) -> Result<Option<Vec<u64>>, SearchExhausted> {
    if sys.trivially_infeasible() {
        return Ok(None);
    }
    let ext = Extended::new(sys);
    let mut found = None;
    ext.complete(limit, |x| {
        let (inhom, proj) = ext.project(x);
        if inhom {
            found = Some(proj);
            true
        } else {
            false
        }
    })?;
    Ok(found)
}

/// The homogenized system over `[x0, x_1..x_n, slack_1..slack_m]`.
struct Extended {
    vars: usize,
    width: usize,
    columns: Vec<Vec<i64>>,
}

impl Extended {
    fn new(sys: &ConstraintSystem) -> Self {
        let slack = sys.geqs.len();
        let width = 1 + sys.vars + slack;
        let rows = sys.eqs.len() + slack;
        let mut columns = vec![vec![0i64; rows]; width];
        for (r, row) in sys.eqs.iter().chain(&sys.geqs).enumerate() {
            columns[0][r] = -row.rhs;
            for (j, &a) in row.coeffs.iter().enumerate() {
                columns[1 + j][r] = a;
            }
        }
        for s in 0..slack {
            columns[1 + sys.vars + s][sys.eqs.len() + s] = -1;
        }
        Extended {
            vars: sys.vars,
            width,
            columns,
        }
    }

    fn project(&self, x: &[u32]) -> (bool, Vec<u64>) {
        (
            x[0] == 1,
            x[1..=self.vars].iter().map(|&v| v as u64).collect(),
        )
    }

    /// Runs the completion procedure, reporting each minimal solution to
    /// `on_solution`; a `true` return stops the search early.
    fn complete(
        &self,
        limit: usize,
        mut on_solution: impl FnMut(&[u32]) -> bool,
    ) -> Result<(), SearchExhausted> {
        let n = self.width;
        let mut found: Vec<Vec<u32>> = Vec::new();
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        let mut level: Vec<(Vec<u32>, Vec<i64>)> = Vec::new();
        // x0 first so inhomogeneous solutions surface early.
        for j in 0..n {
            let mut x = vec![0u32; n];
            x[j] = 1;
            seen.insert(x.clone());
            level.push((x, self.columns[j].clone()));
        }
        let mut generated = level.len();
        while !level.is_empty() {
            let mut open = Vec::with_capacity(level.len());
            for (x, ax) in level {
                if ax.iter().all(|&v| v == 0) {
                    if on_solution(&x) {
                        return Ok(());
                    }
                    found.push(x);
                } else {
                    open.push((x, ax));
                }
            }
            let mut next = Vec::new();
            for (x, ax) in &open {
                for j in 0..n {
                    if j == 0 && x[0] >= 1 {
                        continue;
                    }
                    let dot: i64 = ax.iter().zip(&self.columns[j]).map(|(a, b)| a * b).sum();
                    if dot >= 0 {
                        continue;
                    }
                    let mut y = x.clone();
                    y[j] += 1;
                    if seen.contains(&y) {
                        continue;
                    }
                    if found.iter().any(|b| b.iter().zip(&y).all(|(bv, yv)| bv <= yv)) {
                        continue;
                    }
                    let ay: Vec<i64> = ax.iter().zip(&self.columns[j]).map(|(a, b)| a + b).collect();
                    seen.insert(y.clone());
                    next.push((y, ay));
                }
            }
            generated += next.len();
            if generated > limit {
                return Err(SearchExhausted { limit });
            }
            level = next;
        }
        Ok(())
    }
}
