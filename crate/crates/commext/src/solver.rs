//! Construction of commuting extensions.
//!
//! `extend3` runs the nine-step procedure for a triple; `extend_p` fixes
//! the first matrix's border blocks once and sweeps the remaining indices
//! with the shared steps 2-7.

use crate::extension::{
    check_hypotheses, commutator, verify_extension, Blocks, ExtensionTuple, HypothesisReport,
    InputTuple,
};
use crate::linalg::{solve_exact, SolveError};
use crate::matrix::Matrix;
use crate::subspace::{image, intersection, split_across_direct_sum, SubspaceBasis, SubspaceError};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    NoSolution,
    NotUnique,
    DimensionMismatch,
    NotCommuting,
}

impl std::fmt::Display for RejectReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RejectReason::NoSolution => "no solution",
            RejectReason::NotUnique => "solution not unique",
            RejectReason::DimensionMismatch => "dimension mismatch",
            RejectReason::NotCommuting => "assembled matrices do not commute",
        };
        f.write_str(s)
    }
}

/// A rejection tagged with the step (1-9) where it occurred. Step 9 is
/// the final commutation check in both algorithms.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("rejected at step {step}: {reason}")]
pub struct Reject {
    pub step: u8,
    pub reason: RejectReason,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtendError {
    /// The rank hypotheses do not hold at the requested size; existence of
    /// an extension is left undecided in this case.
    #[error("hypotheses not satisfied: {}", .0.reason.as_deref().unwrap_or("pair/triple dimensions off"))]
    HypothesesNotSatisfied(Box<HypothesisReport>),
    /// Under passing hypotheses, a rejection certifies that no commuting
    /// extension of the requested size exists.
    #[error(transparent)]
    Rejected(Reject),
    #[error("algorithm requires p >= 3, got {0}")]
    UnsupportedP(usize),
    /// No m satisfies H_{1lm} for this l (1-based).
    #[error("no valid partner m for index l = {l}")]
    NoValidPartner { l: usize },
}

fn reject(step: u8, reason: RejectReason) -> ExtendError {
    ExtendError::Rejected(Reject { step, reason })
}

fn map_solve(step: u8, e: SolveError) -> ExtendError {
    match e {
        SolveError::NoSolution => reject(step, RejectReason::NoSolution),
        SolveError::NotUnique => reject(step, RejectReason::NotUnique),
    }
}

fn map_split(step: u8, e: SubspaceError) -> ExtendError {
    match e {
        SubspaceError::NoSolution => reject(step, RejectReason::NoSolution),
        _ => reject(step, RejectReason::DimensionMismatch),
    }
}

/// Solves `X * rhs_of = lhs` for X, i.e. the transposed system.
fn solve_right(step: u8, coeff: &Matrix, rhs: &Matrix) -> Result<Matrix, ExtendError> {
    solve_exact(&coeff.transpose(), &rhs.transpose(), true)
        .map(|x| x.transpose())
        .map_err(|e| map_solve(step, e))
}

/// The blocks produced by steps 2-7 on a triple (A_1, A_2, A_3) with a
/// fixed top-right block B_1. Indices follow the roles in the triple.
struct TripleBlocks {
    c2: Matrix,
    b3: Matrix,
    c1: Option<Matrix>,
    c3: Matrix,
    b2: Matrix,
    d2: Matrix,
    d3: Matrix,
}

/// Steps 2-7: recover all border blocks except B_1 (given) and D_1
/// (step 8). `solve_c1` is off when C_1 is already known from an earlier
/// run; the split producing P_1 still happens since step 5 consumes it.
fn run_steps_2_to_7(
    a1: &Matrix,
    a2: &Matrix,
    a3: &Matrix,
    b1: &Matrix,
    w: usize,
    solve_c1: bool,
) -> Result<TripleBlocks, ExtendError> {
    let im_b1 = image(b1);
    if im_b1.dim() != w {
        return Err(reject(1, RejectReason::DimensionMismatch));
    }

    // Step 2: V_2 = Ima [A_2,A_1] ∩ Ima [A_2,A_3]; decompose
    // [A_1,A_2] = B_2 C_1 - B_1 C_2 and read C_2 off the Ima(B_1) part.
    let v2 = intersect_images(a2, a1, a3).map_err(|e| map_split(2, e))?;
    if v2.dim() != w {
        return Err(reject(2, RejectReason::DimensionMismatch));
    }
    let comm12 = commutator(a1, a2);
    let (_m1, m2) = split_across_direct_sum(&comm12, &v2, &im_b1).map_err(|e| map_split(2, e))?;
    let c2 = solve_exact(b1, &m2, true).map_err(|e| map_solve(2, e))?;

    // Step 3: V_3 = Ima [A_3,A_1] ∩ Ima [A_3,A_2];
    // [A_2,A_3] = N_3 - N_2 with N_3 = B_3 C_2, N_2 = B_2 C_3.
    let v3 = intersect_images(a3, a1, a2).map_err(|e| map_split(3, e))?;
    if v3.dim() != w {
        return Err(reject(3, RejectReason::DimensionMismatch));
    }
    let comm23 = commutator(a2, a3);
    let (n3, n2) = split_across_direct_sum(&comm23, &v3, &v2).map_err(|e| map_split(3, e))?;
    let b3 = solve_right(3, &c2, &n3)?;

    // Step 4: [A_1,A_3] = P_3 - P_1 with P_3 = B_3 C_1, P_1 = B_1 C_3.
    let comm13 = commutator(a1, a3);
    let (p3, p1) = split_across_direct_sum(&comm13, &v3, &im_b1).map_err(|e| map_split(4, e))?;
    let c1 = if solve_c1 {
        Some(solve_exact(&b3, &p3, true).map_err(|e| map_solve(4, e))?)
    } else {
        None
    };

    // Step 5: P_1 = B_1 C_3.
    let c3 = solve_exact(b1, &p1, true).map_err(|e| map_solve(5, e))?;

    // Step 6: N_2 = B_2 C_3.
    let b2 = solve_right(6, &c3, &n2)?;

    // Step 7: B_3 X - B_2 Y = A_2 B_3 - A_3 B_2, then D_2 = X, D_3 = Y.
    let coeff = b3.hconcat(&-&b2);
    let rhs = &(a2 * &b3) - &(a3 * &b2);
    let xy = solve_exact(&coeff, &rhs, true).map_err(|e| map_solve(7, e))?;
    let d2 = xy.submatrix(0, w, 0, w);
    let d3 = xy.submatrix(w, 2 * w, 0, w);

    Ok(TripleBlocks {
        c2,
        b3,
        c1,
        c3,
        b2,
        d2,
        d3,
    })
}

/// Ima [A_k, A_l] ∩ Ima [A_k, A_m].
fn intersect_images(
    ak: &Matrix,
    al: &Matrix,
    am: &Matrix,
) -> Result<SubspaceBasis, SubspaceError> {
    intersection(
        &image(&commutator(ak, al)),
        &image(&commutator(ak, am)),
    )
}

/// Step 8: B_2 D_1 - B_1 D_2 = A_1 B_2 - A_2 B_1, solved for D_1.
fn solve_d1(
    a1: &Matrix,
    a2: &Matrix,
    b1: &Matrix,
    b2: &Matrix,
    d2: &Matrix,
) -> Result<Matrix, ExtendError> {
    let rhs = &(&(a1 * b2) - &(a2 * b1)) + &(b1 * d2);
    solve_exact(b2, &rhs, true).map_err(|e| map_solve(8, e))
}

fn validate_triple(a1: &Matrix, a2: &Matrix, a3: &Matrix, r: usize) -> InputTuple {
    let n = a1.rows();
    assert!(r >= n, "extension size must be at least n");
    InputTuple::new(n, vec![a1.clone(), a2.clone(), a3.clone()])
}

/// Nine-step extension algorithm for a triple. Either returns a verified
/// commuting extension of size exactly `r`, or rejects.
pub fn extend3(
    a1: &Matrix,
    a2: &Matrix,
    a3: &Matrix,
    r: usize,
) -> Result<ExtensionTuple, ExtendError> {
    let input = validate_triple(a1, a2, a3, r);
    let report = check_hypotheses(&input, r);
    if !report.overall {
        return Err(ExtendError::HypothesesNotSatisfied(Box::new(report)));
    }
    let w = r - input.n();

    // Step 1: canonical basis of Ima [A_1,A_2] ∩ Ima [A_1,A_3].
    let inter = intersect_images(a1, a2, a3).map_err(|e| map_split(1, e))?;
    if inter.dim() != w {
        return Err(reject(1, RejectReason::DimensionMismatch));
    }
    extend3_with_b1(a1, a2, a3, r, inter.basis())
}

/// The nine-step algorithm with a caller-chosen B_1. Any full-column-rank
/// matrix with the canonical intersection image is a valid choice; the
/// outputs for two such choices are related by the border conjugation
/// action.
pub fn extend3_with_b1(
    a1: &Matrix,
    a2: &Matrix,
    a3: &Matrix,
    r: usize,
    b1: &Matrix,
) -> Result<ExtensionTuple, ExtendError> {
    let input = validate_triple(a1, a2, a3, r);
    let n = input.n();
    let w = r - n;
    let report = check_hypotheses(&input, r);
    if !report.overall {
        return Err(ExtendError::HypothesesNotSatisfied(Box::new(report)));
    }
    assert_eq!((b1.rows(), b1.cols()), (n, w), "B_1 must be n x (r-n)");
    let inter = intersect_images(a1, a2, a3).map_err(|e| map_split(1, e))?;
    if image(b1) != inter {
        return Err(reject(1, RejectReason::DimensionMismatch));
    }

    let t = run_steps_2_to_7(a1, a2, a3, b1, w, true)?;
    let c1 = t.c1.expect("C_1 solved in the three-matrix run");
    let d1 = solve_d1(a1, a2, b1, &t.b2, &t.d2)?;

    // Step 9: assemble and check commutation.
    let ext = ExtensionTuple::new(
        n,
        r,
        vec![
            Blocks { a: a1.clone(), b: b1.clone(), c: c1, d: d1 },
            Blocks { a: a2.clone(), b: t.b2, c: t.c2, d: t.d2 },
            Blocks { a: a3.clone(), b: t.b3, c: t.c3, d: t.d3 },
        ],
    );
    if !verify_extension(&ext, &input).passed {
        return Err(reject(9, RejectReason::NotCommuting));
    }
    Ok(ext)
}

/// Extension algorithm for p >= 3 matrices. Requires, for every l >= 2,
/// some m with H_{1lm}; partners are chosen as the smallest valid index.
pub fn extend_p(input: &InputTuple, r: usize) -> Result<ExtensionTuple, ExtendError> {
    extend_p_inner(input, r, None)
}

/// `extend_p` with a caller-chosen B_1 (same contract as
/// `extend3_with_b1`).
pub fn extend_p_with_b1(
    input: &InputTuple,
    r: usize,
    b1: &Matrix,
) -> Result<ExtensionTuple, ExtendError> {
    extend_p_inner(input, r, Some(b1))
}

fn extend_p_inner(
    input: &InputTuple,
    r: usize,
    b1_override: Option<&Matrix>,
) -> Result<ExtensionTuple, ExtendError> {
    let p = input.p();
    if p < 3 {
        return Err(ExtendError::UnsupportedP(p));
    }
    let n = input.n();
    assert!(r >= n, "extension size must be at least n");
    let w = r - n;
    let report = check_hypotheses(input, r);
    if !report.overall {
        return Err(ExtendError::HypothesesNotSatisfied(Box::new(report)));
    }
    let partner_for = |l: usize| -> Result<usize, ExtendError> {
        (0..p)
            .find(|&m| m != 0 && m != l && report.h_klm(0, l, m))
            .ok_or(ExtendError::NoValidPartner { l: l + 1 })
    };

    let a = |i: usize| input.matrix(i);
    let mut computed: Vec<Option<Blocks>> = vec![None; p];

    // Fix Z_1, Z_2 and one partner with a full three-matrix run.
    let m0 = partner_for(1)?;
    let inter = intersect_images(a(0), a(1), a(m0)).map_err(|e| map_split(1, e))?;
    if inter.dim() != w {
        return Err(reject(1, RejectReason::DimensionMismatch));
    }
    let b1 = match b1_override {
        Some(b1) => {
            assert_eq!((b1.rows(), b1.cols()), (n, w), "B_1 must be n x (r-n)");
            if image(b1) != inter {
                return Err(reject(1, RejectReason::DimensionMismatch));
            }
            b1.clone()
        }
        None => inter.basis().clone(),
    };
    let t = run_steps_2_to_7(a(0), a(1), a(m0), &b1, w, true)?;
    let c1 = t.c1.expect("C_1 solved in the initial run");
    let d1 = solve_d1(a(0), a(1), &b1, &t.b2, &t.d2)?;
    computed[0] = Some(Blocks { a: a(0).clone(), b: b1.clone(), c: c1, d: d1 });
    computed[1] = Some(Blocks { a: a(1).clone(), b: t.b2, c: t.c2, d: t.d2 });
    computed[m0] = Some(Blocks { a: a(m0).clone(), b: t.b3, c: t.c3, d: t.d3 });

    // Sweep the remaining indices; steps 1 and 8 determine B_1 and D_1
    // and are not rerun, and C_1 is not recomputed.
    for l in 2..p {
        if computed[l].is_some() {
            continue;
        }
        let m = partner_for(l)?;
        let t = run_steps_2_to_7(a(0), a(l), a(m), &b1, w, false)?;
        computed[l] = Some(Blocks { a: a(l).clone(), b: t.b2, c: t.c2, d: t.d2 });
        if computed[m].is_none() {
            computed[m] = Some(Blocks { a: a(m).clone(), b: t.b3, c: t.c3, d: t.d3 });
        }
    }

    let blocks: Vec<Blocks> = computed
        .into_iter()
        .map(|b| b.expect("every index computed"))
        .collect();
    let ext = ExtensionTuple::new(n, r, blocks);
    // Global check over all p(p-1)/2 pairs.
    if !verify_extension(&ext, input).passed {
        return Err(reject(9, RejectReason::NotCommuting));
    }
    Ok(ext)
}
