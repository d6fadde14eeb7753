//! Exact rational feasibility of `A·x = b, x ≥ 0` by phase-one simplex.

use num::{BigInt, BigRational, One, Signed, Zero};

fn q(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Does `A·x = b` have a nonnegative rational solution? `rows[i]` is row
/// `i` of `A`. Uses Bland's rule, so it always terminates.
pub(crate) fn rational_feasible(rows: &[Vec<i64>], rhs: &[i64]) -> bool {
    let m = rows.len();
    if m == 0 {
        return true;
    }
    let n = rows[0].len();
    let width = n + m;
    // tableau rows: [A | I | b] with b ≥ 0
    let mut t: Vec<Vec<BigRational>> = rows
        .iter()
        .zip(rhs)
        .enumerate()
        .map(|(i, (row, &r))| {
            let sign = if r < 0 { -1 } else { 1 };
            let mut out: Vec<BigRational> = row.iter().map(|&a| q(a * sign)).collect();
            out.extend((0..m).map(|k| if k == i { BigRational::one() } else { BigRational::zero() }));
            out.push(q(r * sign));
            out
        })
        .collect();
    let mut basis: Vec<usize> = (n..width).collect();
    // reduced costs of "minimize the sum of artificials"; last entry is -objective
    let mut cost: Vec<BigRational> = vec![BigRational::zero(); width + 1];
    for row in &t {
        for j in 0..n {
            cost[j] -= &row[j];
        }
        cost[width] -= &row[width];
    }
    loop {
        let Some(enter) = (0..width).find(|&j| cost[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..m {
            if !t[i][enter].is_positive() {
                continue;
            }
            let ratio = &t[i][width] / &t[i][enter];
            let better = match &leave {
                None => true,
                Some((li, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let Some((r, _)) = leave else {
            // unbounded direction cannot occur: the objective is bounded below by 0
            unreachable!("phase-one objective is bounded");
        };
        let pivot = t[r][enter].clone();
        for v in t[r].iter_mut() {
            *v /= &pivot;
        }
        let prow = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i == r || row[enter].is_zero() {
                continue;
            }
            let f = row[enter].clone();
            for (v, p) in row.iter_mut().zip(&prow) {
                *v -= &f * p;
            }
        }
        if !cost[enter].is_zero() {
            let f = cost[enter].clone();
            for (v, p) in cost.iter_mut().zip(&prow) {
                *v -= &f * p;
            }
        }
        basis[r] = enter;
    }
    cost[width].is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_systems() {
        assert!(rational_feasible(&[vec![1, 1]], &[2]));
        assert!(!rational_feasible(&[vec![1, 1]], &[-1]));
        assert!(rational_feasible(&[vec![2, -1]], &[-3]));
        // x - y = 1 and y - x = 1
        assert!(!rational_feasible(&[vec![1, -1], vec![-1, 1]], &[1, 1]));
        // 2x = 1 is rationally feasible
        assert!(rational_feasible(&[vec![2]], &[1]));
        assert!(rational_feasible(&[], &[]));
    }

    #[test]
    fn redundant_rows() {
        assert!(rational_feasible(&[vec![1, 2, 0], vec![2, 4, 0], vec![0, 1, 1]], &[3, 6, 1]));
        assert!(!rational_feasible(&[vec![1, 2], vec![2, 4]], &[3, 5]));
    }

    #[test]
    fn agrees_with_integer_grid_when_feasible_there() {
        // any integer solution found by enumeration must be reported feasible
        let rows = vec![vec![1, -2, 3], vec![0, 1, -1]];
        for x in 0..4i64 {
            for y in 0..4i64 {
                for z in 0..4i64 {
                    let b = vec![x - 2 * y + 3 * z, y - z];
                    assert!(rational_feasible(&rows, &b));
                }
            }
        }
    }
}
