//! The regularization engine.
//!
//! One reduction step takes a singular square matrix `A` and congruence
//! transforms it into a staircase shape
//!
//! ```text
//!         ┌ D  E │ C1 ┐  } m2
//! A  ↦    │ F  A2│ 0  │
//!         └ 0  0 │ 0  ┘  } m1
//! ```
//!
//! where `m1` counts the zero rows of the first compression, `C1` has full
//! row rank `m2`, and `A2` is the smaller working matrix the next step
//! consumes. Iterating until the working matrix is nonsingular yields the
//! m-sequence `m1, m2, …, m_{2t}`; the singular part of the input is a
//! direct sum of nilpotent Jordan blocks whose multiplicities are the
//! consecutive differences of that sequence, and the terminal working matrix
//! is the regular part.
//!
//! Each step keeps its transforms and partition blocks, so a
//! [`ReductionTrace`] doubles as a replayable certificate (see
//! [`crate::verify`]).

use crate::error::{Error, Result};
use crate::matrix::{direct_sum, jordan_block, Matrix};
use crate::rank::{is_nonsingular, rank_of, LinalgScalar, RankReport, TolPolicy};
use crate::scalar::{Arithmetic, FormKind, Scalar};

/// Everything one reduction step produced.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord<T: Scalar> {
    /// Zero rows of the first compression: corank of this step's input.
    pub m1: usize,
    /// Row rank of the coupling block `C`.
    pub m2: usize,
    /// First transform, square of the step's input size, nonsingular.
    pub s: Matrix<T>,
    /// Second transform, acts on the leading `(n − m1)`-sized block.
    pub s1: Matrix<T>,
    /// Top-left `m2×m2` partition block.
    pub d: Matrix<T>,
    /// Top-middle `m2×(n − m1 − m2)` partition block.
    pub e: Matrix<T>,
    /// Middle-left `(n − m1 − m2)×m2` partition block.
    pub f: Matrix<T>,
    /// Compressed coupling block, `m2×m1`, full row rank.
    pub c1: Matrix<T>,
    /// Next working matrix, square of size `n − m1 − m2`.
    pub a2: Matrix<T>,
    /// Rank decisions behind `m1` and `m2`.
    pub rank_reports: [RankReport; 2],
}

impl<T: Scalar> StepRecord<T> {
    /// Size of the matrix this step was applied to.
    pub fn input_size(&self) -> usize {
        self.s.rows()
    }
}

/// Full record of a reduction run: the per-step certificates plus the
/// terminal nonsingular working matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionTrace<T: Scalar> {
    pub input_size: usize,
    pub form: FormKind,
    pub steps: Vec<StepRecord<T>>,
    /// The terminal working matrix; nonsingular (possibly `0×0`).
    pub regular: Matrix<T>,
    /// Rank decision certifying the terminal matrix nonsingular.
    pub terminal_report: RankReport,
    /// Magnitude scale of the input (Frobenius norm); `None` for exact
    /// backends. Anchors the confidence margins below.
    pub reference_scale: Option<f64>,
}

impl<T: Scalar> ReductionTrace<T> {
    /// The flattened sequence `m1, m2, m3, …, m_{2t}`.
    pub fn m_sequence(&self) -> Vec<usize> {
        self.steps
            .iter()
            .flat_map(|s| [s.m1, s.m2])
            .collect()
    }

    /// Strictest confidence margin across every rank decision of the run
    /// (terminal check included). Infinite for exact backends; a value of
    /// 10 or less means some structural decision was fragile.
    ///
    /// Besides the classic per-decision margin (smallest accepted singular
    /// value over the threshold), this tracks a forward drift estimate.
    /// Each step splits off the current null space, whose direction is only
    /// known to within `drift / σ_min(kept part)`; the next working matrix
    /// inherits that tilt at full scale, so the drift multiplies by the
    /// working condition number `scale / σ_min(kept)` per step. Every
    /// accepted singular value and every rejection threshold is compared
    /// against the drift reached at its step: decisions inside the drift
    /// are where competing nilpotent structures become indistinguishable,
    /// even when they clear the threshold comfortably.
    pub fn min_margin(&self) -> f64 {
        let Some(scale) = self.reference_scale else {
            return f64::INFINITY;
        };
        let mut margin = f64::INFINITY;
        let mut drift = f64::EPSILON * scale;
        for step in &self.steps {
            for report in &step.rank_reports {
                margin = margin.min(report.margin());
                margin = margin.min(margin_against_drift(report, drift));
            }
            if let Some(acc) = step.rank_reports[0].smallest_accepted {
                if acc > 0.0 {
                    drift *= (scale / acc).max(1.0);
                }
            }
        }
        margin = margin.min(self.terminal_report.margin());
        margin.min(margin_against_drift(&self.terminal_report, drift))
    }

    /// Whether the regular part sits too close to the rank threshold for
    /// the block structure to be trusted (floating backends only).
    pub fn is_ill_conditioned(&self) -> bool {
        T::ARITHMETIC == Arithmetic::Float
            && self.regular.rows() > 0
            && self.terminal_report.margin() <= 10.0
    }
}

/// A regularizing decomposition: nonsingular regular part plus the sizes of
/// the split-off singular Jordan blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizingDecomposition<T: Scalar> {
    pub regular: Matrix<T>,
    /// Block sizes in descending order.
    pub blocks: Vec<usize>,
    pub m_sequence: Vec<usize>,
}

impl<T: Scalar> RegularizingDecomposition<T> {
    pub fn total_size(&self) -> usize {
        self.regular.rows() + self.blocks.iter().sum::<usize>()
    }
}

fn margin_against_drift(report: &RankReport, drift: f64) -> f64 {
    if drift <= 0.0 {
        return f64::INFINITY;
    }
    let accepted = report
        .smallest_accepted
        .map_or(f64::INFINITY, |a| a / drift);
    let rejection = match report.threshold {
        Some(t) if t > 0.0 => t / drift,
        _ => f64::INFINITY,
    };
    accepted.min(rejection)
}

/// Block sizes (descending) determined by an m-sequence: the multiplicity of
/// the size-`i` block is `m_i − m_{i+1}`, reading `m` past the end as zero.
pub fn blocks_from_m_sequence(m_sequence: &[usize]) -> Vec<usize> {
    let mut blocks = Vec::new();
    for i in (0..m_sequence.len()).rev() {
        let next = m_sequence.get(i + 1).copied().unwrap_or(0);
        let multiplicity = m_sequence[i].saturating_sub(next);
        for _ in 0..multiplicity {
            blocks.push(i + 1);
        }
    }
    blocks
}

/// The m-sequence the reduction produces on a direct sum of Jordan blocks
/// of the given sizes: `m_i` counts the blocks of size at least `i`.
pub fn m_sequence_for_blocks(blocks: &[usize]) -> Vec<usize> {
    let Some(&max) = blocks.iter().max() else {
        return Vec::new();
    };
    let t = max.div_ceil(2);
    (1..=2 * t)
        .map(|i| blocks.iter().filter(|&&b| b >= i).count())
        .collect()
}

/// Absolute singular-value floor for rank decisions made *inside* an
/// iterated reduction: `tol_scale · √ε · σ_max(input)`, derived here from
/// the input's own threshold (`tol_scale · n · ε · σ_max`).
///
/// Working matrices deeper in the staircase contain residue of the earlier
/// congruence products instead of exact zeros; that residue is amplified by
/// clustering among the input's small singular values and can sit far above
/// `n·ε·σ_max`, so decisions anchored at the machine-precision threshold
/// would read it as genuine structure. A `√ε`-relative floor is the usual
/// staircase compromise: orders of magnitude above reachable residue,
/// orders of magnitude below the singular values of honest regular parts.
/// Transforms are unitary, so the input's scale remains the right anchor
/// throughout. Single-shot rank decisions keep the plain relative
/// threshold.
pub(crate) fn staircase_floor(input_threshold: Option<f64>, dims: usize) -> Option<f64> {
    input_threshold.map(|t| t / (dims.max(1) as f64 * f64::EPSILON.sqrt()))
}

/// One reduction step on a singular square matrix.
///
/// Compresses the rows of `A`, forms `S·A·S^⋆`, compresses the coupling
/// block `C`, and partitions the result. The bottom `m1` rows of `S·A` are
/// exactly zero by construction, so the staircase zero pattern is exact even
/// in floating arithmetic.
pub fn regularization_step<T: LinalgScalar>(
    a: &Matrix<T>,
    form: FormKind,
    tol: &TolPolicy,
) -> Result<StepRecord<T>> {
    form.check_supported::<T>()?;
    if !a.is_square() {
        return Err(Error::shape(format!(
            "reduction step needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let comp = T::row_compress_any(a, tol);
    let m1 = comp.zero_rows;
    if m1 == 0 {
        return Err(Error::precondition(
            "reduction step applies to singular matrices only",
        ));
    }
    let r1 = n - m1;
    // S·A·S^⋆ = [B C; 0 0] with B square of size r1. Only the top strip is
    // nonzero, so it suffices to multiply A1 by S^⋆.
    let top = &comp.top * &comp.transform.star_unchecked(form);
    let b = top.block(0, r1, 0, r1);
    let c = top.block(0, r1, r1, n);

    let comp2 = T::row_compress_any(&c, tol);
    let m2 = comp2.report.rank;
    let s1 = comp2.transform;
    let c1 = comp2.top;

    let b2 = &(&s1 * &b) * &s1.star_unchecked(form);
    let d = b2.block(0, m2, 0, m2);
    let e = b2.block(0, m2, m2, r1);
    let f = b2.block(m2, r1, 0, m2);
    let a2 = b2.block(m2, r1, m2, r1);

    Ok(StepRecord {
        m1,
        m2,
        s: comp.transform,
        s1,
        d,
        e,
        f,
        c1,
        a2,
        rank_reports: [comp.report, comp2.report],
    })
}

/// Runs the reduction to completion and assembles the block bookkeeping.
///
/// A nonsingular input (including `0×0`) is its own regular part: no steps,
/// no blocks, empty m-sequence.
pub fn regularize<T: LinalgScalar>(
    a: &Matrix<T>,
    form: FormKind,
    tol: &TolPolicy,
) -> Result<(RegularizingDecomposition<T>, ReductionTrace<T>)> {
    form.check_supported::<T>()?;
    if !a.is_square() {
        return Err(Error::shape(format!(
            "regularization needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let run_tol = tol.anchored(staircase_floor(rank_of(a, tol).threshold, a.rows()));
    let mut working = a.clone();
    let mut steps: Vec<StepRecord<T>> = Vec::new();
    let terminal_report = loop {
        let report = rank_of(&working, &run_tol);
        if report.rank == working.rows() {
            break report;
        }
        let step = regularization_step(&working, form, &run_tol)?;
        assert!(
            step.a2.rows() < working.rows(),
            "reduction step failed to shrink the working matrix"
        );
        working = step.a2.clone();
        steps.push(step);
    };

    let trace = ReductionTrace {
        input_size: a.rows(),
        form,
        steps,
        regular: working.clone(),
        terminal_report,
        reference_scale: match T::ARITHMETIC {
            Arithmetic::Float => Some(a.fro_norm()),
            Arithmetic::Exact => None,
        },
    };
    let m_sequence = trace.m_sequence();
    let decomposition = RegularizingDecomposition {
        regular: working,
        blocks: blocks_from_m_sequence(&m_sequence),
        m_sequence,
    };
    Ok((decomposition, trace))
}

/// Builds the block-diagonal matrix `regular ⊕ Jordan blocks` described by a
/// decomposition, blocks in descending size order.
pub fn assemble_decomposition<T: LinalgScalar>(
    d: &RegularizingDecomposition<T>,
) -> Result<Matrix<T>> {
    if !is_nonsingular(&d.regular, &TolPolicy::default()) {
        return Err(Error::precondition(
            "regular part of a decomposition must be nonsingular",
        ));
    }
    let mut sorted = d.blocks.clone();
    sorted.sort_unstable_by(|x, y| y.cmp(x));
    let mut parts = vec![d.regular.clone()];
    for size in sorted {
        parts.push(jordan_block(size)?);
    }
    direct_sum(&parts)
}
