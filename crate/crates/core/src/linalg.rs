//! Dense exact Gaussian elimination.

use num_traits::Zero;

use crate::rational::Rational;

fn size(r: &Rational) -> u64 {
    r.numer().bits() + r.denom().bits()
}

/// Solves `a · x = b` column by column; `None` if `a` is singular.
/// Pivots are chosen by smallest bit size to limit coefficient growth.
pub(crate) fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Vec<Rational>>) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).filter(|&r| !a[r][col].is_zero()).min_by_key(|&r| size(&a[r][col]))?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        for j in col..n {
            a[col][j] = &a[col][j] * &inv;
        }
        for v in &mut b[col] {
            *v = &*v * &inv;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in col..n {
                if !a[col][j].is_zero() {
                    let d = &f * &a[col][j];
                    a[r][j] -= d;
                }
            }
            for k in 0..b[r].len() {
                if !b[col][k].is_zero() {
                    let d = &f * &b[col][k];
                    b[r][k] -= d;
                }
            }
        }
    }
    Some(b)
}

/// Single right-hand side.
pub(crate) fn solve_vec(a: Vec<Vec<Rational>>, b: Vec<Rational>) -> Option<Vec<Rational>> {
    let cols = solve(a, b.into_iter().map(|v| vec![v]).collect())?;
    Some(cols.into_iter().map(|mut row| row.pop().expect("one column")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    #[test]
    fn two_by_two() {
        // x + y = 3, x - y = 1
        let a = vec![vec![int(1), int(1)], vec![int(1), int(-1)]];
        assert_eq!(solve_vec(a, vec![int(3), int(1)]).unwrap(), vec![int(2), int(1)]);
    }

    #[test]
    fn needs_row_swap_and_detects_singular() {
        let a = vec![vec![int(0), int(1)], vec![ratio(1, 2), int(0)]];
        assert_eq!(solve_vec(a, vec![int(5), int(1)]).unwrap(), vec![int(2), int(5)]);
        let s = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert!(solve_vec(s, vec![int(1), int(1)]).is_none());
    }

    proptest! {
        #[test]
        fn solution_satisfies_system(
            entries in proptest::collection::vec(-4i64..5, 9),
            xs in proptest::collection::vec(-6i64..7, 3),
        ) {
            let a: Vec<Vec<Rational>> = (0..3).map(|i| (0..3).map(|j| int(entries[3 * i + j])).collect()).collect();
            let x: Vec<Rational> = xs.iter().map(|&v| ratio(v, 3)).collect();
            let b: Vec<Rational> = a.iter().map(|row| row.iter().zip(&x).map(|(p, q)| p * q).sum()).collect();
            if let Some(sol) = solve_vec(a.clone(), b.clone()) {
                for (row, rhs) in a.iter().zip(&b) {
                    let lhs: Rational = row.iter().zip(&sol).map(|(p, q)| p * q).sum();
                    prop_assert_eq!(&lhs, rhs);
                }
            }
        }
    }
}
