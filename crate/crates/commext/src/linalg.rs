//! Exact elimination: RREF, rank, kernels, and linear-system solving.
//!
//! Everything goes through one canonical reduced row echelon form so that
//! all downstream bases are deterministic and comparable bit-for-bit.

use crate::matrix::{Matrix, Scalar};
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("linear system is inconsistent")]
    NoSolution,
    #[error("solution exists but is not unique")]
    NotUnique,
}

/// Reduced row echelon form together with the sorted pivot column indices.
pub fn rref(m: &Matrix) -> (Matrix, Vec<usize>) {
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut pivots = Vec::new();
    let mut pivot_row = 0usize;

    for col in 0..cols {
        if pivot_row == rows {
            break;
        }
        let found = (pivot_row..rows).find(|&i| !a[(i, col)].is_zero());
        let src = match found {
            Some(i) => i,
            None => continue,
        };
        a.swap_rows(pivot_row, src);

        let inv = {
            let p = a[(pivot_row, col)].clone();
            Scalar::one() / p
        };
        for j in col..cols {
            let v = &a[(pivot_row, j)] * &inv;
            a[(pivot_row, j)] = v;
        }
        for i in 0..rows {
            if i == pivot_row || a[(i, col)].is_zero() {
                continue;
            }
            let factor = a[(i, col)].clone();
            for j in col..cols {
                let v = &a[(i, j)] - &(&factor * &a[(pivot_row, j)]);
                a[(i, j)] = v;
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    (a, pivots)
}

pub fn rank(m: &Matrix) -> usize {
    rref(m).1.len()
}

/// Canonical basis of the null space, one column per free variable.
///
/// Column for free variable `f` has a 1 in row `f`, the negated RREF column
/// in the pivot rows, and 0 elsewhere; free columns are ordered by index.
pub fn kernel_basis(m: &Matrix) -> Matrix {
    let (r, pivots) = rref(m);
    let cols = m.cols();
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut out = Matrix::zero(cols, free.len());
    for (k, &f) in free.iter().enumerate() {
        out[(f, k)] = Scalar::one();
        for (i, &p) in pivots.iter().enumerate() {
            out[(p, k)] = -r[(i, f)].clone();
        }
    }
    out
}

/// Solves `a * X = b` columnwise.
///
/// Free variables are set to zero, so the returned solution is canonical.
/// With `require_unique`, a consistent underdetermined system is an error.
pub fn solve_exact(a: &Matrix, b: &Matrix, require_unique: bool) -> Result<Matrix, SolveError> {
    assert_eq!(a.rows(), b.rows(), "solve_exact: row count mismatch");
    let aug = a.hconcat(b);
    let (r, pivots) = rref(&aug);
    if pivots.iter().any(|&p| p >= a.cols()) {
        return Err(SolveError::NoSolution);
    }
    if require_unique && pivots.len() < a.cols() {
        return Err(SolveError::NotUnique);
    }
    let mut x = Matrix::zero(a.cols(), b.cols());
    for (i, &p) in pivots.iter().enumerate() {
        for j in 0..b.cols() {
            x[(p, j)] = r[(i, a.cols() + j)].clone();
        }
    }
    Ok(x)
}

/// Inverse of a square matrix, or `None` if singular.
pub fn invert(m: &Matrix) -> Option<Matrix> {
    if !m.is_square() {
        return None;
    }
    solve_exact(m, &Matrix::identity(m.rows()), true).ok()
}

pub fn is_invertible(m: &Matrix) -> bool {
    m.is_square() && rank(m) == m.rows()
}
