//! Instance generation: generic simultaneously-diagonalizable tuples with
//! a known ground-truth extension, the 0/1-diagonal structured
//! construction, and the always-valid nilpotent size-2n extension.

use crate::extension::{
    check_hypotheses, random_int_matrix, Blocks, ExtensionTuple, HypothesisReport, InputTuple,
};
use crate::linalg::invert;
use crate::matrix::{sc, Matrix, Scalar};
use crate::subspace::{image, is_direct_sum};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("generation failed: {0}")]
    GenerationFailed(String),
    #[error("invalid index sets: {0}")]
    InvalidIndexSets(String),
}

/// The row/column factors of the conjugation Z_i = R^-1 D_i R:
/// U is the first n rows of R^-1, U' the rest; V' is the first n columns
/// of R, V the rest. Then U V' = I_n, U' V = I_{r-n}, U V = 0, U' V' = 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugationFactors {
    pub u: Matrix,       // n x r
    pub u_prime: Matrix, // (r-n) x r
    pub v: Matrix,       // r x (r-n)
    pub v_prime: Matrix, // r x n
}

/// A tuple with a known simultaneously-diagonalizable extension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruthInstance {
    pub n: usize,
    pub r: usize,
    pub p: usize,
    /// The conjugating matrix R.
    pub conjugator: Matrix,
    pub diagonals: Vec<Matrix>,
    /// The commuting Z_i = R^-1 D_i R.
    pub full_tuple: Vec<Matrix>,
    /// Top-left n x n blocks A_i.
    pub input: InputTuple,
    pub factors: ConjugationFactors,
    /// The Z_i in block form: the ground-truth extension of `input`.
    pub extension: ExtensionTuple,
    pub report: HypothesisReport,
}

fn build_instance(
    n: usize,
    r: usize,
    conjugator: Matrix,
    inverse: Matrix,
    diagonals: Vec<Matrix>,
) -> GroundTruthInstance {
    let p = diagonals.len();
    let factors = ConjugationFactors {
        u: inverse.submatrix(0, n, 0, r),
        u_prime: inverse.submatrix(n, r, 0, r),
        v_prime: conjugator.submatrix(0, r, 0, n),
        v: conjugator.submatrix(0, r, n, r),
    };
    let full_tuple: Vec<Matrix> = diagonals
        .iter()
        .map(|d| &(&inverse * d) * &conjugator)
        .collect();
    let extension = ExtensionTuple::from_full(n, full_tuple.clone());
    let input = extension.input();
    let report = check_hypotheses(&input, r);
    GroundTruthInstance {
        n,
        r,
        p,
        conjugator,
        diagonals,
        full_tuple,
        input,
        factors,
        extension,
        report,
    }
}

fn sample_invertible(rng: &mut ChaCha8Rng, size: usize, bound: i64) -> (Matrix, Matrix) {
    loop {
        let m = random_int_matrix(rng, size, size, bound);
        if let Some(inv) = invert(&m) {
            return (m, inv);
        }
    }
}

/// Distinct random diagonal entries in [-bound, bound].
fn sample_distinct_diagonal(rng: &mut ChaCha8Rng, size: usize, bound: i64) -> Matrix {
    let mut seen = std::collections::HashSet::new();
    let mut entries = Vec::with_capacity(size);
    while entries.len() < size {
        let v = rng.random_range(-bound..=bound);
        if seen.insert(v) {
            entries.push(sc(v));
        }
    }
    Matrix::diagonal(&entries)
}

/// Samples Z_i = R^-1 D_i R with integer R and distinct random diagonals,
/// rejection-sampling until all pair/triple hypotheses hold at size `r`.
pub fn generate_generic(
    n: usize,
    r: usize,
    p: usize,
    seed: u64,
    entry_bound: i64,
    max_retries: usize,
) -> Result<GroundTruthInstance, GenerateError> {
    if p == 0 || r < n {
        return Err(GenerateError::GenerationFailed(format!(
            "need p >= 1 and r >= n, got n={n}, r={r}, p={p}"
        )));
    }
    let w = r - n;
    // Unsatisfiable rank hypotheses fail fast instead of burning retries.
    if p >= 3 && 3 * w > n {
        return Err(GenerateError::GenerationFailed(format!(
            "hypothesis (ii) needs 3(r-n) <= n, got 3*{w} > {n} (r > 4n/3)"
        )));
    }
    if p == 2 && 2 * w > n {
        return Err(GenerateError::GenerationFailed(format!(
            "hypothesis (i) needs 2(r-n) <= n, got 2*{w} > {n} (r > 3n/2)"
        )));
    }
    if entry_bound < 1 || 2 * entry_bound + 1 < r as i64 {
        return Err(GenerateError::GenerationFailed(format!(
            "entry bound {entry_bound} too small for {r} distinct diagonal entries"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_retries.max(1) {
        let (conj, inv) = sample_invertible(&mut rng, r, entry_bound);
        let diagonals: Vec<Matrix> = (0..p)
            .map(|_| sample_distinct_diagonal(&mut rng, r, entry_bound))
            .collect();
        let inst = build_instance(n, r, conj, inv, diagonals);
        let pass = match p {
            1 => true,
            2 => inst.report.pair_ranks.values().all(|&v| v == 2 * w),
            _ => inst.report.all_hypotheses() && inst.report.overall,
        };
        if pass {
            return Ok(inst);
        }
    }
    Err(GenerateError::GenerationFailed(format!(
        "hypotheses not met after {max_retries} attempts (n={n}, r={r}, p={p})"
    )))
}

/// Deterministic 0/1-diagonal construction: D_i is the indicator of the
/// i-th index set. Realizes border blocks of rank r-n with images in
/// direct sum; R is retried until the needed minors are nonzero.
pub fn generate_structured(
    n: usize,
    r: usize,
    p: usize,
    index_sets: &[Vec<usize>],
    seed: u64,
) -> Result<GroundTruthInstance, GenerateError> {
    if r < n || p == 0 {
        return Err(GenerateError::GenerationFailed(format!(
            "need p >= 1 and r >= n, got n={n}, r={r}, p={p}"
        )));
    }
    let w = r - n;
    if index_sets.len() != p {
        return Err(GenerateError::InvalidIndexSets(format!(
            "expected {p} index sets, got {}",
            index_sets.len()
        )));
    }
    let mut used = vec![false; r];
    for set in index_sets {
        if set.len() != w {
            return Err(GenerateError::InvalidIndexSets(format!(
                "each set must have size r - n = {w}, got {}",
                set.len()
            )));
        }
        for &i in set {
            if i >= r {
                return Err(GenerateError::InvalidIndexSets(format!(
                    "index {i} out of range [0, {r})"
                )));
            }
            if used[i] {
                return Err(GenerateError::InvalidIndexSets(format!(
                    "index {i} appears in more than one set"
                )));
            }
            used[i] = true;
        }
    }

    let diagonals: Vec<Matrix> = index_sets
        .iter()
        .map(|set| {
            Matrix::diagonal(
                &(0..r)
                    .map(|i| if set.contains(&i) { Scalar::one() } else { Scalar::zero() })
                    .collect::<Vec<_>>(),
            )
        })
        .collect();

    const ENTRY_BOUND: i64 = 10;
    const MAX_RETRIES: usize = 64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_RETRIES {
        let (conj, inv) = sample_invertible(&mut rng, r, ENTRY_BOUND);
        let inst = build_instance(n, r, conj, inv, diagonals.clone());
        let images: Vec<_> = inst
            .extension
            .all_blocks()
            .iter()
            .map(|bl| image(&bl.b))
            .collect();
        let full_rank = images.iter().all(|im| im.dim() == w);
        if full_rank && is_direct_sum(&images).expect("equal ambient dims") {
            return Ok(inst);
        }
    }
    Err(GenerateError::GenerationFailed(format!(
        "no conjugator with the required nonzero minors after {MAX_RETRIES} attempts"
    )))
}

/// The size-2n extension N_i = (A_i -A_i; A_i -A_i); all pairwise
/// products are zero, so it always commutes.
pub fn generate_nilpotent(input: &InputTuple) -> ExtensionTuple {
    let n = input.n();
    let blocks = input
        .matrices()
        .iter()
        .map(|a| Blocks {
            a: a.clone(),
            b: -a,
            c: a.clone(),
            d: -a,
        })
        .collect();
    ExtensionTuple::new(n, 2 * n, blocks)
}
