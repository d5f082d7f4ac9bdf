//! Input tuples, block-decomposed extensions, hypothesis reports,
//! verification, and the minimality certificate.

use crate::linalg::rank;
use crate::matrix::Matrix;
use crate::subspace::{image, sum, SubspaceBasis};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// A tuple of p square matrices of size n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputTuple {
    n: usize,
    matrices: Vec<Matrix>,
}

impl InputTuple {
    pub fn new(n: usize, matrices: Vec<Matrix>) -> Self {
        assert!(!matrices.is_empty(), "input tuple must contain at least one matrix");
        for m in &matrices {
            assert_eq!((m.rows(), m.cols()), (n, n), "input matrices must be n x n");
        }
        InputTuple { n, matrices }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrix(&self, i: usize) -> &Matrix {
        &self.matrices[i]
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    pub fn pairwise_commuting(&self) -> bool {
        let p = self.p();
        for i in 0..p {
            for j in i + 1..p {
                if !commutator(&self.matrices[i], &self.matrices[j]).is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

/// One size-r extension matrix in block form, top-left block of size n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Blocks {
    pub a: Matrix, // n x n
    pub b: Matrix, // n x (r-n)
    pub c: Matrix, // (r-n) x n
    pub d: Matrix, // (r-n) x (r-n)
}

impl Blocks {
    pub fn assemble(&self) -> Matrix {
        Matrix::block_assemble(&self.a, &self.b, &self.c, &self.d)
    }
}

/// A candidate or verified commuting extension of size r of an n-tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionTuple {
    n: usize,
    r: usize,
    blocks: Vec<Blocks>,
}

impl ExtensionTuple {
    pub fn new(n: usize, r: usize, blocks: Vec<Blocks>) -> Self {
        assert!(n <= r, "extension size must be at least the input size");
        let w = r - n;
        for bl in &blocks {
            assert_eq!((bl.a.rows(), bl.a.cols()), (n, n));
            assert_eq!((bl.b.rows(), bl.b.cols()), (n, w));
            assert_eq!((bl.c.rows(), bl.c.cols()), (w, n));
            assert_eq!((bl.d.rows(), bl.d.cols()), (w, w));
        }
        ExtensionTuple { n, r, blocks }
    }

    /// Splits full size-r matrices into block form.
    pub fn from_full(n: usize, full: Vec<Matrix>) -> Self {
        let r = full.first().map_or(n, |m| m.rows());
        let blocks = full
            .into_iter()
            .map(|z| {
                assert_eq!((z.rows(), z.cols()), (r, r), "extension matrices must be r x r");
                let (a, b, c, d) = z.block_split(n);
                Blocks { a, b, c, d }
            })
            .collect();
        ExtensionTuple::new(n, r, blocks)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn p(&self) -> usize {
        self.blocks.len()
    }

    pub fn border_width(&self) -> usize {
        self.r - self.n
    }

    pub fn blocks(&self, i: usize) -> &Blocks {
        &self.blocks[i]
    }

    pub fn all_blocks(&self) -> &[Blocks] {
        &self.blocks
    }

    pub fn assemble(&self, i: usize) -> Matrix {
        self.blocks[i].assemble()
    }

    pub fn assemble_all(&self) -> Vec<Matrix> {
        self.blocks.iter().map(Blocks::assemble).collect()
    }

    pub fn input(&self) -> InputTuple {
        InputTuple::new(self.n, self.blocks.iter().map(|b| b.a.clone()).collect())
    }
}

/// `[A, B] = AB - BA`.
pub fn commutator(a: &Matrix, b: &Matrix) -> Matrix {
    assert!(a.is_square() && b.is_square() && a.rows() == b.rows(), "commutator: size mismatch");
    &(a * b) - &(b * a)
}

/// Per-pair commutator ranks and per-triple sum dimensions against the
/// required values 2(r-n) and 3(r-n).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisReport {
    pub n: usize,
    pub r: usize,
    pub p: usize,
    /// rank [A_k, A_l], keyed k < l (0-based). Symmetric by antisymmetry
    /// of the commutator.
    pub pair_ranks: BTreeMap<(usize, usize), usize>,
    /// dim(Ima [A_k, A_l] + Ima [A_k, A_m]), keyed (pivot k, l, m) with
    /// l < m, all distinct.
    pub triple_dims: BTreeMap<(usize, usize, usize), usize>,
    pub overall: bool,
    pub reason: Option<String>,
}

impl HypothesisReport {
    pub fn border_width(&self) -> usize {
        self.r - self.n
    }

    pub fn required_pair_rank(&self) -> usize {
        2 * self.border_width()
    }

    pub fn required_triple_dim(&self) -> usize {
        3 * self.border_width()
    }

    pub fn pair_rank(&self, k: usize, l: usize) -> usize {
        let key = (k.min(l), k.max(l));
        self.pair_ranks[&key]
    }

    pub fn pass_pair(&self, k: usize, l: usize) -> bool {
        self.pair_rank(k, l) == self.required_pair_rank()
    }

    pub fn triple_dim(&self, k: usize, l: usize, m: usize) -> usize {
        let key = (k, l.min(m), l.max(m));
        self.triple_dims[&key]
    }

    pub fn pass_triple(&self, k: usize, l: usize, m: usize) -> bool {
        self.triple_dim(k, l, m) == self.required_triple_dim()
    }

    pub fn pass_pairs(&self) -> BTreeMap<(usize, usize), bool> {
        let req = self.required_pair_rank();
        self.pair_ranks.iter().map(|(&k, &v)| (k, v == req)).collect()
    }

    pub fn pass_triples(&self) -> BTreeMap<(usize, usize, usize), bool> {
        let req = self.required_triple_dim();
        self.triple_dims.iter().map(|(&k, &v)| (k, v == req)).collect()
    }

    /// Hypothesis H_klm: all three pairwise commutator ranks equal 2(r-n)
    /// and all three pivot-anchored sums have dimension 3(r-n).
    pub fn h_klm(&self, k: usize, l: usize, m: usize) -> bool {
        self.pass_pair(k, l)
            && self.pass_pair(k, m)
            && self.pass_pair(l, m)
            && self.pass_triple(k, l, m)
            && self.pass_triple(l, k, m)
            && self.pass_triple(m, k, l)
    }

    /// Every pair and every triple passes.
    pub fn all_hypotheses(&self) -> bool {
        let req_p = self.required_pair_rank();
        let req_t = self.required_triple_dim();
        self.pair_ranks.values().all(|&v| v == req_p)
            && (self.p < 3 || self.triple_dims.values().all(|&v| v == req_t))
            && self.p >= 2
    }
}

/// Checks hypotheses (i)/(ii) for the target size `r`.
///
/// The solver gate (`overall`) requires that for every l >= 2 there is
/// some m such that H_{1lm} holds; for p < 3 the triple map is empty and
/// the gate fails with reason "unsupported p".
pub fn check_hypotheses(input: &InputTuple, r: usize) -> HypothesisReport {
    let n = input.n();
    let p = input.p();
    assert!(n <= r, "check_hypotheses: r must be at least n");

    // Ima [A_k, A_l] = Ima [A_l, A_k], so unordered images suffice.
    let mut images: BTreeMap<(usize, usize), SubspaceBasis> = BTreeMap::new();
    let mut pair_ranks = BTreeMap::new();
    for k in 0..p {
        for l in k + 1..p {
            let im = image(&commutator(input.matrix(k), input.matrix(l)));
            pair_ranks.insert((k, l), im.dim());
            images.insert((k, l), im);
        }
    }

    let img = |k: usize, l: usize| &images[&(k.min(l), k.max(l))];
    let mut triple_dims = BTreeMap::new();
    for k in 0..p {
        for l in 0..p {
            for m in l + 1..p {
                if l == k || m == k {
                    continue;
                }
                let v = sum(img(k, l), img(k, m)).expect("equal ambient dims");
                triple_dims.insert((k, l, m), v.dim());
            }
        }
    }

    let mut report = HypothesisReport {
        n,
        r,
        p,
        pair_ranks,
        triple_dims,
        overall: false,
        reason: None,
    };

    if p < 3 {
        report.reason = Some("unsupported p (need p >= 3)".to_string());
        return report;
    }
    let mut failing = Vec::new();
    for l in 1..p {
        let ok = (0..p).any(|m| m != 0 && m != l && report.h_klm(0, l, m));
        if !ok {
            failing.push(l + 1);
        }
    }
    if failing.is_empty() {
        report.overall = true;
    } else {
        report.reason = Some(format!(
            "no partner m with H_1lm for l in {failing:?} (1-based)"
        ));
    }
    report
}

/// Where a verification failed first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyFailure {
    /// Top-left block of Z_i differs from A_i at (row, col).
    TopLeftMismatch { index: usize, row: usize, col: usize },
    /// Z_i Z_j != Z_j Z_i, first differing coordinate of the products.
    NonCommuting { i: usize, j: usize, row: usize, col: usize },
    SizeMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub passed: bool,
    pub failure: Option<VerifyFailure>,
}

fn first_difference(x: &Matrix, y: &Matrix) -> Option<(usize, usize)> {
    for i in 0..x.rows() {
        for j in 0..x.cols() {
            if x[(i, j)] != y[(i, j)] {
                return Some((i, j));
            }
        }
    }
    None
}

/// Exact verification: top-left blocks equal the input, all pairs commute.
pub fn verify_extension(ext: &ExtensionTuple, input: &InputTuple) -> VerifyReport {
    if ext.n() != input.n() || ext.p() != input.p() {
        return VerifyReport {
            passed: false,
            failure: Some(VerifyFailure::SizeMismatch),
        };
    }
    for i in 0..ext.p() {
        if let Some((row, col)) = first_difference(&ext.blocks(i).a, input.matrix(i)) {
            return VerifyReport {
                passed: false,
                failure: Some(VerifyFailure::TopLeftMismatch { index: i, row, col }),
            };
        }
    }
    let full = ext.assemble_all();
    for i in 0..full.len() {
        for j in i + 1..full.len() {
            let ij = &full[i] * &full[j];
            let ji = &full[j] * &full[i];
            if let Some((row, col)) = first_difference(&ij, &ji) {
                return VerifyReport {
                    passed: false,
                    failure: Some(VerifyFailure::NonCommuting { i, j, row, col }),
                };
            }
        }
    }
    VerifyReport {
        passed: true,
        failure: None,
    }
}

/// One-sided randomized commutativity check: two random linear
/// combinations of the Z_i must commute. `false` is always correct;
/// `true` may be a false positive with probability vanishing in
/// `coeff_bound`.
pub fn verify_randomized(ext: &ExtensionTuple, seed: u64, coeff_bound: i64) -> bool {
    assert!(coeff_bound > 0, "coeff_bound must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let full = ext.assemble_all();
    let draw = |rng: &mut ChaCha8Rng| -> Matrix {
        let mut acc = Matrix::zero(ext.r(), ext.r());
        for z in &full {
            let c = rng.random_range(-coeff_bound..=coeff_bound);
            acc = &acc + &z.scale(&crate::matrix::sc(c));
        }
        acc
    };
    let s = draw(&mut rng);
    let t = draw(&mut rng);
    commutator(&s, &t).is_zero()
}

/// Lower bound on the size of any commuting extension:
/// n + ceil(max pair commutator rank / 2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalityCertificate {
    pub lower_bound: usize,
    /// A pair attaining the maximal commutator rank (0-based).
    pub witness_pair: (usize, usize),
    pub achieved_r: Option<usize>,
    pub tight: bool,
}

/// Computes the commutator-rank lower bound. When a verified extension is
/// supplied, the certificate records whether its size attains the bound.
pub fn minimality_bound(
    input: &InputTuple,
    verified: Option<&ExtensionTuple>,
) -> MinimalityCertificate {
    assert!(input.p() >= 2, "minimality_bound needs at least two matrices");
    let mut best = (0usize, (0usize, 1usize));
    for k in 0..input.p() {
        for l in k + 1..input.p() {
            let rk = rank(&commutator(input.matrix(k), input.matrix(l)));
            if rk > best.0 {
                best = (rk, (k, l));
            }
        }
    }
    let lower_bound = input.n() + best.0.div_ceil(2);
    let achieved_r = verified.map(ExtensionTuple::r);
    MinimalityCertificate {
        lower_bound,
        witness_pair: best.1,
        achieved_r,
        tight: achieved_r == Some(lower_bound),
    }
}

/// Integer-entry random matrix, entries uniform in [-bound, bound].
pub fn random_int_matrix(rng: &mut impl Rng, rows: usize, cols: usize, bound: i64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| {
        crate::matrix::sc(rng.random_range(-bound..=bound))
    })
}
