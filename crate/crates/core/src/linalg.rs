//! Small dense helpers shared by the sampling routines.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative pivot threshold for numerical rank.
pub const RANK_EPS: f64 = 1e-9;

/// Condition estimates above this are treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Numerical rank by Gaussian elimination with complete pivoting. Pivots
/// at or below `eps * max|m|` count as zero.
pub fn rank(m: &DMatrix<f64>, eps: f64) -> usize {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let cut = eps * a.amax();
    if a.amax() == 0.0 {
        return 0;
    }
    let mut r = 0;
    while r < rows.min(cols) {
        let (mut pi, mut pj, mut best) = (r, r, 0.0);
        for j in r..cols {
            for i in r..rows {
                if a[(i, j)].abs() > best {
                    best = a[(i, j)].abs();
                    pi = i;
                    pj = j;
                }
            }
        }
        if best <= cut {
            break;
        }
        a.swap_rows(r, pi);
        a.swap_columns(r, pj);
        let pivot = a[(r, r)];
        for i in r + 1..rows {
            let f = a[(i, r)] / pivot;
            if f != 0.0 {
                for j in r..cols {
                    a[(i, j)] -= f * a[(r, j)];
                }
            }
        }
        r += 1;
    }
    r
}

fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.lp_norm(1)).fold(0.0, f64::max)
}

/// Solves the square system `a x = b` with partially pivoted LU, refusing
/// systems whose 1-norm condition number exceeds [`MAX_CONDITION`].
pub fn solve_guarded(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let lu = a.clone().lu();
    let inv = lu.try_inverse().ok_or(Error::IllConditioned(f64::INFINITY))?;
    let cond = norm1(a) * norm1(&inv);
    if !cond.is_finite() || cond > MAX_CONDITION {
        return Err(Error::IllConditioned(cond));
    }
    a.clone()
        .lu()
        .solve(b)
        .ok_or(Error::IllConditioned(f64::INFINITY))
}
