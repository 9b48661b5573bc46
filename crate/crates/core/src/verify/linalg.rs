//! Exact dense linear solving over rationals: just enough Gauss-Jordan
//! elimination for stationary distributions, absorption systems, and
//! gain/bias policy evaluation. Pivoting picks the first nonzero entry,
//! which is deterministic and, with exact arithmetic, always sound.

use crate::rational::Rational;
use num::Zero;

/// Solves `A x = b` for square `A` and one or more right-hand sides
/// (column `j` of the solution answers `rhs[.][j]`). Returns `None` when
/// the matrix is singular.
pub fn solve(
    mut a: Vec<Vec<Rational>>,
    mut rhs: Vec<Vec<Rational>>,
) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n));
    debug_assert_eq!(rhs.len(), n);
    let k = rhs.first().map_or(0, Vec::len);
    debug_assert!(rhs.iter().all(|row| row.len() == k));
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        let pivot_value = a[col][col].clone();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &pivot_value;
            for c in col..n {
                let sub = &factor * &a[col][c];
                a[r][c] -= sub;
            }
            for j in 0..k {
                let sub = &factor * &rhs[col][j];
                rhs[r][j] -= sub;
            }
        }
    }
    let mut out = vec![vec![Rational::zero(); k]; n];
    for (r, out_row) in out.iter_mut().enumerate() {
        for (j, cell) in out_row.iter_mut().enumerate() {
            *cell = &rhs[r][j] / &a[r][r];
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    #[test]
    fn solves_a_two_by_two_system() {
        // x + 2y = 5, 3x + 4y = 11  =>  x = 1, y = 2.
        let a = vec![vec![rat_int(1), rat_int(2)], vec![rat_int(3), rat_int(4)]];
        let b = vec![vec![rat_int(5)], vec![rat_int(11)]];
        let x = solve(a, b).unwrap();
        assert_eq!(x, vec![vec![rat_int(1)], vec![rat_int(2)]]);
    }

    #[test]
    fn handles_multiple_right_hand_sides_and_zero_pivots() {
        // First pivot is zero, forcing the row swap.
        let a = vec![
            vec![rat_int(0), rat_int(1), rat_int(0)],
            vec![rat_int(2), rat_int(0), rat_int(0)],
            vec![rat_int(0), rat_int(0), rat(1, 2)],
        ];
        let b = vec![
            vec![rat_int(3), rat_int(0)],
            vec![rat_int(4), rat_int(2)],
            vec![rat_int(1), rat_int(5)],
        ];
        let x = solve(a, b).unwrap();
        assert_eq!(
            x,
            vec![
                vec![rat_int(2), rat_int(1)],
                vec![rat_int(3), rat_int(0)],
                vec![rat_int(2), rat_int(10)],
            ]
        );
    }

    #[test]
    fn reports_singular_matrices() {
        let a = vec![vec![rat_int(1), rat_int(2)], vec![rat_int(2), rat_int(4)]];
        let b = vec![vec![rat_int(1)], vec![rat_int(2)]];
        assert!(solve(a, b).is_none());
    }
}
