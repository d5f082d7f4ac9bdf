//! The border conjugation action on extensions and the equivalence
//! decision it induces: (A, B, C, D) -> (A, BM, M^-1 C, M^-1 D M).

use crate::extension::{Blocks, ExtensionTuple};
use crate::linalg::{invert, rank, solve_exact};
use crate::matrix::Matrix;
use thiserror::Error;

/// An invertible matrix of size r - n acting on the border blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BorderTransform {
    m: Matrix,
    inv: Matrix,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivalenceError {
    /// First differing block after the best reconciling transform.
    #[error("not equivalent: matrix {index}, block {block}")]
    NotEquivalent { index: usize, block: &'static str },
    /// B_1 is not of full column rank, so the anchored decision does not
    /// apply; equivalence is unknown.
    #[error("degenerate input: B_1 not of full column rank")]
    DegenerateInput,
    #[error("extension shapes do not match")]
    SizeMismatch,
    #[error("matrix is not an invertible transform of the border size")]
    NotInvertible,
}

impl BorderTransform {
    pub fn new(m: Matrix) -> Result<Self, EquivalenceError> {
        let inv = invert(&m).ok_or(EquivalenceError::NotInvertible)?;
        Ok(BorderTransform { m, inv })
    }

    pub fn identity(size: usize) -> Self {
        BorderTransform {
            m: Matrix::identity(size),
            inv: Matrix::identity(size),
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn inverse(&self) -> BorderTransform {
        BorderTransform {
            m: self.inv.clone(),
            inv: self.m.clone(),
        }
    }

    pub fn size(&self) -> usize {
        self.m.rows()
    }
}

/// Conjugates every border block; top-left blocks are untouched.
pub fn apply_action(ext: &ExtensionTuple, t: &BorderTransform) -> ExtensionTuple {
    assert_eq!(t.size(), ext.border_width(), "transform size must equal r - n");
    let blocks = ext
        .all_blocks()
        .iter()
        .map(|bl| Blocks {
            a: bl.a.clone(),
            b: &bl.b * &t.m,
            c: &t.inv * &bl.c,
            d: &(&t.inv * &bl.d) * &t.m,
        })
        .collect();
    ExtensionTuple::new(ext.n(), ext.r(), blocks)
}

/// Decides whether `e2` is the image of `e1` under the border action,
/// anchored on B_1: solves B_1 M = B'_1 (unique when B_1 has full column
/// rank), then compares all blocks after applying the transform.
pub fn find_equivalence(
    e1: &ExtensionTuple,
    e2: &ExtensionTuple,
) -> Result<BorderTransform, EquivalenceError> {
    if (e1.n(), e1.r(), e1.p()) != (e2.n(), e2.r(), e2.p()) {
        return Err(EquivalenceError::SizeMismatch);
    }
    let w = e1.border_width();
    if w == 0 {
        return if e1 == e2 {
            Ok(BorderTransform::identity(0))
        } else {
            first_block_difference(e1, e2)
        };
    }
    let b1 = &e1.all_blocks()[0].b;
    if rank(b1) != w {
        return Err(EquivalenceError::DegenerateInput);
    }
    let m = solve_exact(b1, &e2.all_blocks()[0].b, true)
        .map_err(|_| EquivalenceError::NotEquivalent { index: 0, block: "B" })?;
    let t = BorderTransform::new(m)
        .map_err(|_| EquivalenceError::NotEquivalent { index: 0, block: "B" })?;
    let mapped = apply_action(e1, &t);
    if &mapped == e2 {
        Ok(t)
    } else {
        first_block_difference(&mapped, e2)
    }
}

fn first_block_difference(
    x: &ExtensionTuple,
    y: &ExtensionTuple,
) -> Result<BorderTransform, EquivalenceError> {
    for (i, (bx, by)) in x.all_blocks().iter().zip(y.all_blocks()).enumerate() {
        for (name, mx, my) in [
            ("A", &bx.a, &by.a),
            ("B", &bx.b, &by.b),
            ("C", &bx.c, &by.c),
            ("D", &bx.d, &by.d),
        ] {
            if mx != my {
                return Err(EquivalenceError::NotEquivalent { index: i, block: name });
            }
        }
    }
    // Only reachable when the tuples are equal, which callers rule out.
    Err(EquivalenceError::NotEquivalent { index: 0, block: "A" })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::verify_extension;
    use crate::generate::generate_nilpotent;
    use crate::extension::InputTuple;
    use crate::matrix::sc;

    fn sample_extension() -> (InputTuple, ExtensionTuple) {
        let a = Matrix::from_i64(&[&[1, 0], &[0, 2]]);
        let b = Matrix::from_i64(&[&[0, 1], &[1, 0]]);
        let input = InputTuple::new(2, vec![a, b]);
        let ext = generate_nilpotent(&input);
        (input, ext)
    }

    #[test]
    fn identity_action_is_noop() {
        let (_, ext) = sample_extension();
        let t = BorderTransform::identity(ext.border_width());
        assert_eq!(apply_action(&ext, &t), ext);
    }

    #[test]
    fn action_inverse_round_trip() {
        let (input, ext) = sample_extension();
        let m = Matrix::from_i64(&[&[1, 1], &[0, 1]]);
        let t = BorderTransform::new(m).unwrap();
        let moved = apply_action(&ext, &t);
        assert!(verify_extension(&moved, &input).passed);
        assert_eq!(apply_action(&moved, &t.inverse()), ext);
    }

    #[test]
    fn find_equivalence_reflexive() {
        let (_, ext) = sample_extension();
        let t = find_equivalence(&ext, &ext).unwrap();
        assert_eq!(t.matrix(), &Matrix::identity(ext.border_width()));
    }

    #[test]
    fn find_equivalence_recovers_transform() {
        let (_, ext) = sample_extension();
        // The nilpotent construction has B_1 = -A_1, full rank here.
        let m = Matrix::from_i64(&[&[2, 1], &[1, 1]]);
        let t0 = BorderTransform::new(m).unwrap();
        let moved = apply_action(&ext, &t0);
        let t = find_equivalence(&ext, &moved).unwrap();
        assert_eq!(t.matrix(), t0.matrix());
        assert_eq!(apply_action(&moved, &t.inverse()), ext);
    }

    #[test]
    fn nonequivalent_reports_witness() {
        let (_, ext) = sample_extension();
        let mut other = ext.clone();
        let mut blocks: Vec<Blocks> = other.all_blocks().to_vec();
        blocks[1].d[(0, 0)] = &blocks[1].d[(0, 0)] + &sc(1);
        other = ExtensionTuple::new(ext.n(), ext.r(), blocks);
        let err = find_equivalence(&ext, &other).unwrap_err();
        assert_eq!(err, EquivalenceError::NotEquivalent { index: 1, block: "D" });
    }
}
