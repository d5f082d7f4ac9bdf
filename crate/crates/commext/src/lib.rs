//! Commuting extensions of matrix tuples over exact rationals.
//!
//! A tuple (Z_1, ..., Z_p) of pairwise-commuting size-r matrices is a
//! commuting extension of (A_1, ..., A_p) of size n when each A_i is the
//! top-left block of Z_i. This crate checks the rank hypotheses under
//! which such extensions are essentially unique, constructs them by
//! solving a fixed sequence of exact linear systems, verifies and
//! certifies the results, and generates test instances with known ground
//! truth.
//!
//! All arithmetic is over arbitrary-precision rationals; every check is
//! exact, never approximate.

pub mod action;
pub mod extension;
pub mod generate;
pub mod linalg;
pub mod matrix;
pub mod solver;
pub mod subspace;
pub mod textio;

pub use action::{apply_action, find_equivalence, BorderTransform, EquivalenceError};
pub use extension::{
    check_hypotheses, commutator, minimality_bound, verify_extension, verify_randomized, Blocks,
    ExtensionTuple, HypothesisReport, InputTuple, MinimalityCertificate, VerifyFailure,
    VerifyReport,
};
pub use generate::{
    generate_generic, generate_nilpotent, generate_structured, GenerateError, GroundTruthInstance,
};
pub use linalg::{kernel_basis, rank, rref, solve_exact, SolveError};
pub use matrix::{frac, sc, Matrix, Scalar};
pub use solver::{
    extend3, extend3_with_b1, extend_p, extend_p_with_b1, ExtendError, Reject, RejectReason,
};
pub use subspace::{
    coordinates_in, image, intersection, is_direct_sum, split_across_direct_sum, sum,
    SubspaceBasis, SubspaceError,
};
pub use textio::{
    read_extension, read_tuple, write_extension, write_tuple, ParseError, TupleDocument,
};
