//! Subspaces of K^n with canonical bases.
//!
//! A subspace is represented by the unique column-echelon basis obtained by
//! row-reducing the transpose of any spanning set. Two values represent the
//! same subspace iff their basis matrices are identical, which makes
//! equality, sums and intersections directly comparable.

use crate::linalg::{kernel_basis, rref, solve_exact, SolveError};
use crate::matrix::Matrix;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubspaceError {
    #[error("ambient dimensions differ: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("target image is not contained in the direct sum")]
    NoSolution,
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    basis: Matrix, // ambient_dim rows, full column rank, canonical
}

impl SubspaceBasis {
    pub fn zero(ambient_dim: usize) -> Self {
        SubspaceBasis {
            ambient_dim,
            basis: Matrix::zero(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        SubspaceBasis {
            ambient_dim,
            basis: Matrix::identity(ambient_dim),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    /// Basis matrix: `ambient_dim` rows, `dim` columns.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn contains_columns_of(&self, m: &Matrix) -> bool {
        m.rows() == self.ambient_dim && solve_exact(&self.basis, m, false).is_ok()
    }
}

/// Canonical basis of the column span of `m`.
pub fn image(m: &Matrix) -> SubspaceBasis {
    let (r, pivots) = rref(&m.transpose());
    let basis = r.submatrix(0, pivots.len(), 0, m.rows()).transpose();
    SubspaceBasis {
        ambient_dim: m.rows(),
        basis,
    }
}

fn check_ambient(u: &SubspaceBasis, v: &SubspaceBasis) -> Result<(), SubspaceError> {
    if u.ambient_dim != v.ambient_dim {
        return Err(SubspaceError::AmbientMismatch(u.ambient_dim, v.ambient_dim));
    }
    Ok(())
}

pub fn sum(u: &SubspaceBasis, v: &SubspaceBasis) -> Result<SubspaceBasis, SubspaceError> {
    check_ambient(u, v)?;
    Ok(image(&u.basis.hconcat(&v.basis)))
}

/// U ∩ V via the kernel of the concatenated bases: a kernel vector (x; y)
/// of [U | V] satisfies Ux = -Vy, so Ux runs over the intersection.
pub fn intersection(u: &SubspaceBasis, v: &SubspaceBasis) -> Result<SubspaceBasis, SubspaceError> {
    check_ambient(u, v)?;
    let k = kernel_basis(&u.basis.hconcat(&v.basis));
    let x_part = k.submatrix(0, u.dim(), 0, k.cols());
    Ok(image(&(&u.basis * &x_part)))
}

/// True iff the iterated sum has dimension equal to the sum of dimensions.
pub fn is_direct_sum(spaces: &[SubspaceBasis]) -> Result<bool, SubspaceError> {
    let Some(first) = spaces.first() else {
        return Ok(true);
    };
    let mut acc = SubspaceBasis::zero(first.ambient_dim);
    let mut total = 0usize;
    for s in spaces {
        acc = sum(&acc, s)?;
        total += s.dim();
    }
    Ok(acc.dim() == total)
}

/// The unique (X, Y) with `T = P X + Q Y`, for P, Q of full column rank
/// with images in direct sum. Preconditions are checked, not assumed.
pub fn coordinates_in(
    t: &Matrix,
    p: &Matrix,
    q: &Matrix,
) -> Result<(Matrix, Matrix), SubspaceError> {
    if t.rows() != p.rows() || t.rows() != q.rows() {
        return Err(SubspaceError::AmbientMismatch(t.rows(), p.rows()));
    }
    let ip = image(p);
    let iq = image(q);
    if ip.dim() != p.cols() || iq.dim() != q.cols() {
        return Err(SubspaceError::PreconditionViolated("P or Q not of full column rank"));
    }
    if !is_direct_sum(&[ip, iq])? {
        return Err(SubspaceError::PreconditionViolated("images of P and Q not in direct sum"));
    }
    let stacked = p.hconcat(q);
    match solve_exact(&stacked, t, true) {
        Ok(w) => {
            let x = w.submatrix(0, p.cols(), 0, w.cols());
            let y = w.submatrix(p.cols(), w.rows(), 0, w.cols());
            Ok((x, y))
        }
        Err(SolveError::NoSolution) => Err(SubspaceError::NoSolution),
        // Full column rank of [P | Q] rules this out.
        Err(SolveError::NotUnique) => Err(SubspaceError::PreconditionViolated("unexpected non-unique split")),
    }
}

/// The unique (M1, M2) with `s = M1 - M2`, Ima(M1) ⊆ U, Ima(M2) ⊆ V,
/// for U, V in direct sum.
pub fn split_across_direct_sum(
    s: &Matrix,
    u: &SubspaceBasis,
    v: &SubspaceBasis,
) -> Result<(Matrix, Matrix), SubspaceError> {
    check_ambient(u, v)?;
    if s.rows() != u.ambient_dim {
        return Err(SubspaceError::AmbientMismatch(s.rows(), u.ambient_dim));
    }
    if !is_direct_sum(&[u.clone(), v.clone()])? {
        return Err(SubspaceError::PreconditionViolated("U and V not in direct sum"));
    }
    let stacked = u.basis.hconcat(&v.basis);
    match solve_exact(&stacked, s, true) {
        Ok(w) => {
            let x = w.submatrix(0, u.dim(), 0, w.cols());
            let y = w.submatrix(u.dim(), w.rows(), 0, w.cols());
            let m1 = &u.basis * &x;
            let m2 = -&(&v.basis * &y);
            Ok((m1, m2))
        }
        Err(SolveError::NoSolution) => Err(SubspaceError::NoSolution),
        Err(SolveError::NotUnique) => Err(SubspaceError::PreconditionViolated("unexpected non-unique split")),
    }
}
