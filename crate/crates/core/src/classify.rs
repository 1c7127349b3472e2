//! Deciding topological equivalence of two forms up to their regular parts.
//!
//! Two square matrices of the same size are compared through their
//! regularizing decompositions: differing singular block multisets (or
//! sizes) prove the forms inequivalent, identical decompositions with equal
//! or empty regular parts prove them equivalent, and anything else reduces
//! the question to the two nonsingular regular parts, which this module
//! deliberately does not decide in general. A caller holding an explicit
//! congruence witness between the regular parts can close that gap with
//! [`check_congruence_witness`].
//!
//! The form convention is `Φ(x, y) = xᵀ·A·ỹ` (second argument conjugated in
//! the sesquilinear case), so the left kernel of the form is the left null
//! space of `A`.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rank::{rank_of, LinalgScalar, TolPolicy};
use crate::reduction::regularize;
use crate::scalar::{FormKind, Scalar};

/// Invariant that rules out equivalence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Inequivalence {
    /// The ambient spaces have different dimension.
    Size { a: usize, b: usize },
    /// The singular Jordan block multisets differ.
    Blocks { a: Vec<usize>, b: Vec<usize> },
    /// The regular parts have different size.
    RegularSize { a: usize, b: usize },
}

impl std::fmt::Display for Inequivalence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Inequivalence::Size { a, b } => write!(f, "sizes differ ({a} vs {b})"),
            Inequivalence::Blocks { a, b } => {
                write!(f, "singular summands differ ({a:?} vs {b:?})")
            }
            Inequivalence::RegularSize { a, b } => {
                write!(f, "regular part sizes differ ({a} vs {b})")
            }
        }
    }
}

/// Outcome of comparing two forms.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict<T: Scalar> {
    /// The forms are topologically equivalent.
    Equivalent,
    /// A necessary invariant provably differs.
    NotEquivalent(Inequivalence),
    /// The singular structure agrees; equivalence holds if and only if it
    /// holds for these two nonsingular regular parts.
    ReducedToRegularParts {
        regular_a: Matrix<T>,
        regular_b: Matrix<T>,
    },
}

impl<T: Scalar> Verdict<T> {
    /// Tag without payload, e.g. for exit-code mapping.
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::Equivalent => "equivalent",
            Verdict::NotEquivalent(_) => "not-equivalent",
            Verdict::ReducedToRegularParts { .. } => "reduced-to-regular-parts",
        }
    }
}

/// Dimensions of the two form subspaces used as independent cross-checks of
/// the reduction: `dim_l` must equal the first `m1`, and
/// `size − dim_k` the first `m2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubspaceReport {
    pub dim_l: usize,
    pub dim_k: usize,
}

/// Dimension of the left kernel `{x : Φ(x, ·) = 0}`, i.e. `n − rank(A)`.
pub fn left_kernel_dim<T: LinalgScalar>(
    a: &Matrix<T>,
    form: FormKind,
    tol: &TolPolicy,
) -> Result<usize> {
    form.check_supported::<T>()?;
    require_square(a, "left kernel")?;
    Ok(a.rows() - rank_of(a, tol).rank)
}

/// Dimension of `K = {x : Φ(x, L) = 0}` where `L` is the left kernel.
///
/// With `N` spanning `L` this is `n − rank(A·Ñ)`, the conjugation applied
/// only for sesquilinear forms.
pub fn k_subspace_dim<T: LinalgScalar>(
    a: &Matrix<T>,
    form: FormKind,
    tol: &TolPolicy,
) -> Result<usize> {
    form.check_supported::<T>()?;
    require_square(a, "K subspace")?;
    let n = a.rows();
    let comp = T::row_compress_any(a, tol);
    let basis = comp.transform.block(n - comp.zero_rows, n, 0, n).transpose();
    let coupled = match form {
        FormKind::Bilinear => a * &basis,
        FormKind::Sesquilinear => a * &basis.conjugate(),
    };
    // The coupled matrix can be pure roundoff (K = everything); its rank
    // decision is anchored at the scale of `a` itself, with the same floor
    // the reduction loop uses.
    let inner = tol.anchored(crate::reduction::staircase_floor(comp.report.threshold, n));
    Ok(n - rank_of(&coupled, &inner).rank)
}

/// Both subspace dimensions in one call.
pub fn subspace_report<T: LinalgScalar>(
    a: &Matrix<T>,
    form: FormKind,
    tol: &TolPolicy,
) -> Result<SubspaceReport> {
    Ok(SubspaceReport {
        dim_l: left_kernel_dim(a, form, tol)?,
        dim_k: k_subspace_dim(a, form, tol)?,
    })
}

/// Decides topological equivalence of two forms as far as their regularizing
/// decompositions allow.
pub fn compare<T: LinalgScalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    form: FormKind,
    tol: &TolPolicy,
) -> Result<Verdict<T>> {
    form.check_supported::<T>()?;
    require_square(a, "comparison")?;
    require_square(b, "comparison")?;
    if a.rows() != b.rows() {
        return Ok(Verdict::NotEquivalent(Inequivalence::Size {
            a: a.rows(),
            b: b.rows(),
        }));
    }
    let (da, _) = regularize(a, form, tol)?;
    let (db, _) = regularize(b, form, tol)?;
    if da.blocks != db.blocks {
        return Ok(Verdict::NotEquivalent(Inequivalence::Blocks {
            a: da.blocks,
            b: db.blocks,
        }));
    }
    if da.regular.rows() != db.regular.rows() {
        return Ok(Verdict::NotEquivalent(Inequivalence::RegularSize {
            a: da.regular.rows(),
            b: db.regular.rows(),
        }));
    }
    if da.regular.rows() == 0 || da.regular == db.regular {
        return Ok(Verdict::Equivalent);
    }
    Ok(Verdict::ReducedToRegularParts {
        regular_a: da.regular,
        regular_b: db.regular,
    })
}

/// Checks whether `S` witnesses a congruence `S·R_A·S^⋆ = R_B`.
///
/// A linear congruence is in particular a topological equivalence, so a
/// `true` answer upgrades [`Verdict::ReducedToRegularParts`] to equivalent.
/// Floating comparison is entrywise within `tol·(1 + max|R_B|)`.
pub fn check_congruence_witness<T: LinalgScalar>(
    regular_a: &Matrix<T>,
    regular_b: &Matrix<T>,
    witness: &Matrix<T>,
    form: FormKind,
    tol: f64,
) -> Result<bool> {
    form.check_supported::<T>()?;
    for (name, m) in [("first", regular_a), ("second", regular_b), ("witness", witness)] {
        if !m.is_square() {
            return Err(Error::shape(format!("{name} matrix is not square")));
        }
    }
    if regular_a.rows() != regular_b.rows() || witness.rows() != regular_a.rows() {
        return Err(Error::shape(format!(
            "witness check needs equal sizes, got {} / {} / {}",
            regular_a.rows(),
            regular_b.rows(),
            witness.rows()
        )));
    }
    if rank_of(witness, &TolPolicy::default()).rank != witness.rows() {
        return Ok(false);
    }
    let image = &(witness * regular_a) * &witness.star_unchecked(form);
    Ok(match T::ARITHMETIC {
        crate::scalar::Arithmetic::Exact => image == *regular_b,
        crate::scalar::Arithmetic::Float => {
            let dev = image.max_abs_diff(regular_b).unwrap_or(f64::INFINITY);
            dev <= tol * (1.0 + regular_b.max_abs())
        }
    })
}

/// [`compare`] with an optional explicit witness: a verified congruence
/// between the regular parts upgrades the reduced verdict to equivalence.
pub fn compare_with_witness<T: LinalgScalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    witness: Option<&Matrix<T>>,
    form: FormKind,
    tol: &TolPolicy,
    witness_tol: f64,
) -> Result<Verdict<T>> {
    let verdict = compare(a, b, form, tol)?;
    if let (Verdict::ReducedToRegularParts { regular_a, regular_b }, Some(w)) =
        (&verdict, witness)
    {
        if check_congruence_witness(regular_a, regular_b, w, form, witness_tol)? {
            return Ok(Verdict::Equivalent);
        }
    }
    Ok(verdict)
}

fn require_square<T: Scalar>(m: &Matrix<T>, what: &str) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::shape(format!(
            "{what} needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )))
    }
}
