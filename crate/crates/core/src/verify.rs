//! Replay verification of reduction traces.
//!
//! A [`ReductionTrace`] is treated as an untrusted certificate: every claim
//! it makes is re-checked against the original input: transforms really are
//! nonsingular (unitary, for floating backends), the staircase zero patterns
//! hold, the stored partition blocks reproduce, the coupling blocks have
//! full row rank, the terminal matrix is nonsingular, and the m-sequence is
//! weakly decreasing. Exact backends compare exactly; floating backends
//! compare within `tol` scaled by the working matrix magnitude.

use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rank::{rank_of, LinalgScalar, TolPolicy};
use crate::reduction::ReductionTrace;
use crate::scalar::{Arithmetic, FormKind, Scalar};

/// Outcome of a single named check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// Check-specific figure of merit: residual for comparisons against
    /// zero or stored blocks, rank margin for rank decisions.
    pub margin: Option<f64>,
    pub detail: String,
}

/// All check outcomes of one verification run.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub checks: Vec<CheckOutcome>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed { "ok  " } else { "FAIL" };
            write!(f, "{status} {}", c.name)?;
            if let Some(m) = c.margin {
                write!(f, " [{m:.3e}]")?;
            }
            if !c.detail.is_empty() {
                write!(f, " :: {}", c.detail)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

struct Checker {
    checks: Vec<CheckOutcome>,
}

impl Checker {
    fn push(&mut self, name: impl Into<String>, passed: bool, margin: Option<f64>, detail: String) {
        self.checks.push(CheckOutcome {
            name: name.into(),
            passed,
            margin,
            detail,
        });
    }

    fn compare<T: LinalgScalar>(
        &mut self,
        name: impl Into<String>,
        got: &Matrix<T>,
        want: &Matrix<T>,
        tol_abs: f64,
    ) {
        match got.max_abs_diff(want) {
            None => self.push(
                name,
                false,
                None,
                format!(
                    "shape mismatch: {}x{} vs {}x{}",
                    got.rows(),
                    got.cols(),
                    want.rows(),
                    want.cols()
                ),
            ),
            Some(dev) => {
                let passed = if T::ARITHMETIC == Arithmetic::Exact {
                    got == want
                } else {
                    dev <= tol_abs
                };
                self.push(name, passed, Some(dev), String::new());
            }
        }
    }
}

/// Replays a trace against the matrix it claims to decompose.
///
/// Fails fast (with a shape error) only when the trace is for a different
/// input size; every other defect is reported as a failed check so that all
/// problems surface at once.
pub fn verify_trace<T: LinalgScalar>(
    a: &Matrix<T>,
    trace: &ReductionTrace<T>,
    form: FormKind,
    tol: f64,
) -> Result<VerificationReport> {
    form.check_supported::<T>()?;
    if !a.is_square() || trace.input_size != a.rows() {
        return Err(Error::shape(format!(
            "trace describes a {0}x{0} input, got {1}x{2}",
            trace.input_size,
            a.rows(),
            a.cols()
        )));
    }
    let rank_tol = TolPolicy::default();
    let mut ck = Checker { checks: Vec::new() };

    ck.push(
        "form-matches",
        trace.form == form,
        None,
        format!("trace records {}, verifying against {}", trace.form, form),
    );

    let mut working = a.clone();
    for (idx, step) in trace.steps.iter().enumerate() {
        let k = idx + 1;
        let n = working.rows();
        let shapes_ok = step_shapes_consistent(step, n);
        ck.push(
            format!("step{k}.shape"),
            shapes_ok,
            None,
            if shapes_ok {
                String::new()
            } else {
                format!("stored blocks inconsistent with m1={}, m2={}", step.m1, step.m2)
            },
        );
        if !shapes_ok {
            ck.push(
                format!("step{k}.replay"),
                false,
                None,
                "skipped: inconsistent shapes".into(),
            );
            break;
        }
        let r1 = n - step.m1;
        let scale = 1.0 + working.max_abs();
        let tol_abs = tol * scale;

        check_transform(&mut ck, format!("step{k}.s-nonsingular"), &step.s, tol, &rank_tol);
        check_transform(&mut ck, format!("step{k}.s1-nonsingular"), &step.s1, tol, &rank_tol);

        let m = &(&step.s * &working) * &step.s.star_unchecked(form);
        ck.compare(
            format!("step{k}.compression-zeros"),
            &m.block(r1, n, 0, n),
            &Matrix::zeros(step.m1, n),
            tol_abs,
        );

        let b = m.block(0, r1, 0, r1);
        let c = m.block(0, r1, r1, n);
        let sc = &step.s1 * &c;
        ck.compare(format!("step{k}.c1-matches"), &sc.block(0, step.m2, 0, step.m1), &step.c1, tol_abs);
        ck.compare(
            format!("step{k}.c1-zeros"),
            &sc.block(step.m2, r1, 0, step.m1),
            &Matrix::zeros(r1 - step.m2, step.m1),
            tol_abs,
        );

        let b2 = &(&step.s1 * &b) * &step.s1.star_unchecked(form);
        ck.compare(format!("step{k}.d-matches"), &b2.block(0, step.m2, 0, step.m2), &step.d, tol_abs);
        ck.compare(format!("step{k}.e-matches"), &b2.block(0, step.m2, step.m2, r1), &step.e, tol_abs);
        ck.compare(format!("step{k}.f-matches"), &b2.block(step.m2, r1, 0, step.m2), &step.f, tol_abs);
        ck.compare(format!("step{k}.a2-matches"), &b2.block(step.m2, r1, step.m2, r1), &step.a2, tol_abs);

        let c1_rank = rank_of(&step.c1, &rank_tol);
        ck.push(
            format!("step{k}.c1-full-rank"),
            c1_rank.rank == step.m2,
            Some(c1_rank.margin()),
            format!("rank {} of {} rows", c1_rank.rank, step.m2),
        );
        ck.push(
            format!("step{k}.m2-le-m1"),
            step.m2 <= step.m1,
            None,
            format!("m2={} m1={}", step.m2, step.m1),
        );

        working = step.a2.clone();
    }

    let scale = 1.0 + trace.regular.max_abs();
    ck.compare("regular-matches-replay", &working, &trace.regular, tol * scale);

    let reg_rank = rank_of(&trace.regular, &rank_tol);
    ck.push(
        "regular-nonsingular",
        reg_rank.rank == trace.regular.rows(),
        Some(reg_rank.margin()),
        format!("rank {} of size {}", reg_rank.rank, trace.regular.rows()),
    );

    let ms = trace.m_sequence();
    let monotone = ms.windows(2).all(|w| w[0] >= w[1]);
    ck.push(
        "m-monotonicity",
        monotone,
        None,
        format!("m-sequence {ms:?}"),
    );

    let consumed: usize = trace.steps.iter().map(|s| s.m1 + s.m2).sum();
    ck.push(
        "size-telescoping",
        trace.regular.rows() + consumed == trace.input_size,
        None,
        format!(
            "regular {} + consumed {} vs input {}",
            trace.regular.rows(),
            consumed,
            trace.input_size
        ),
    );

    Ok(VerificationReport { checks: ck.checks })
}

fn step_shapes_consistent<T: Scalar>(
    step: &crate::reduction::StepRecord<T>,
    n: usize,
) -> bool {
    if step.m1 > n || step.m2 > n - step.m1 {
        return false;
    }
    let r1 = n - step.m1;
    let r2 = r1 - step.m2;
    step.s.rows() == n
        && step.s.cols() == n
        && step.s1.rows() == r1
        && step.s1.cols() == r1
        && step.d.rows() == step.m2
        && step.d.cols() == step.m2
        && step.e.rows() == step.m2
        && step.e.cols() == r2
        && step.f.rows() == r2
        && step.f.cols() == step.m2
        && step.c1.rows() == step.m2
        && step.c1.cols() == step.m1
        && step.a2.rows() == r2
        && step.a2.cols() == r2
}

/// A transform must be invertible; for floating backends the reduction
/// promises unitary transforms, so unitarity is what gets checked.
fn check_transform<T: LinalgScalar>(
    ck: &mut Checker,
    name: String,
    s: &Matrix<T>,
    tol: f64,
    rank_tol: &TolPolicy,
) {
    if T::ARITHMETIC == Arithmetic::Exact {
        let report = rank_of(s, rank_tol);
        ck.push(
            name,
            s.is_square() && report.rank == s.rows(),
            Some(report.margin()),
            format!("rank {} of size {}", report.rank, s.rows()),
        );
    } else {
        let gram = s * &s.conjugate().transpose();
        let dev = gram
            .max_abs_diff(&Matrix::identity(s.rows()))
            .unwrap_or(f64::INFINITY);
        ck.push(name, dev <= tol, Some(dev), "unitarity residual".into());
    }
}
