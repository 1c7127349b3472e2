//! Regularizing decompositions of bilinear and sesquilinear forms.
//!
//! A square matrix over ℝ or ℂ presents a form that transforms by
//! `S·A·Sᵀ` (bilinear) or `S·A·S^*` (sesquilinear) under change of basis.
//! This crate splits such a matrix, by a sequence of rank-revealing
//! congruence steps, into a nonsingular *regular part* plus a direct sum of
//! nilpotent Jordan blocks, its regularizing decomposition, and builds on
//! that to decide topological equivalence of two forms up to their regular
//! parts.
//!
//! Two arithmetic backends share one code path:
//!
//! * **exact**: arbitrary-precision rationals ([`num_rational::BigRational`])
//!   or Gaussian rationals ([`GaussianRational`]); every rank decision is an
//!   exact zero test;
//! * **float**: `f64` or [`Complex64`]; rank decisions go through an SVD
//!   threshold, transforms are unitary, and every decision carries a margin
//!   that downstream consumers can audit.
//!
//! Entry points:
//!
//! * [`regularize`] runs the reduction, returning the decomposition and a
//!   replayable [`ReductionTrace`];
//! * [`verify_trace`] re-checks a trace against its input;
//! * [`compare`] is the equivalence classifier;
//! * [`synthesize`] builds seeded instances with known ground truth.

pub mod classify;
pub mod error;
pub mod matrix;
pub mod rank;
pub mod reduction;
pub mod scalar;
pub mod synth;
pub mod verify;

pub use classify::{
    check_congruence_witness, compare, compare_with_witness, k_subspace_dim, left_kernel_dim,
    subspace_report, Inequivalence, SubspaceReport, Verdict,
};
pub use error::{Error, Result};
pub use matrix::{direct_sum, jordan_block, Matrix};
pub use rank::{
    is_nonsingular, left_null_basis, rank_of, row_compress, Compression, LinalgScalar,
    RankReport, TolPolicy,
};
pub use reduction::{
    assemble_decomposition, blocks_from_m_sequence, m_sequence_for_blocks, regularization_step,
    regularize, ReductionTrace, RegularizingDecomposition, StepRecord,
};
pub use scalar::{
    Arithmetic, Complex64, Field, FormKind, GaussianRational, Scalar, ScalarSpec,
};
pub use synth::{
    random_nonsingular, random_unitary, synthesize, SampleScalar, Scramble, SynthesisSpec,
    GENERATOR_ID,
};
pub use verify::{verify_trace, CheckOutcome, VerificationReport};

/// Exact real scalar, re-exported for downstream convenience.
pub use num_rational::BigRational;
