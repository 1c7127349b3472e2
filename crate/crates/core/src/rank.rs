//! Rank-revealing primitives: exact elimination and floating SVD behind one
//! interface.
//!
//! Every structural decision the reduction makes (how many zero rows a
//! compression produces, whether a working matrix is nonsingular) funnels
//! through [`LinalgScalar::rank_report`] or [`LinalgScalar::row_compress_any`],
//! so the two backends differ only here.
//!
//! Floating rank uses the usual relative threshold
//! `tol_scale · max(rows, cols) · ε · σ_max`; the report keeps the smallest
//! accepted singular value so callers can judge how safe the decision was.

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Complex64, GaussianRational, Scalar};

/// Threshold policy for floating rank decisions. Ignored by exact backends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TolPolicy {
    /// Multiplier on the default relative threshold.
    pub tol_scale: f64,
    /// Absolute singular-value floor. A rank decision about a matrix that is
    /// itself reduction noise must not trust the matrix's own scale, so
    /// iterated algorithms anchor this at the original input's threshold.
    pub floor: f64,
}

impl Default for TolPolicy {
    fn default() -> Self {
        TolPolicy {
            tol_scale: 1.0,
            floor: 0.0,
        }
    }
}

impl TolPolicy {
    pub fn new(tol_scale: f64) -> Self {
        TolPolicy {
            tol_scale,
            floor: 0.0,
        }
    }

    /// Same policy with the floor raised to at least `floor`.
    pub fn anchored(&self, floor: Option<f64>) -> Self {
        TolPolicy {
            tol_scale: self.tol_scale,
            floor: self.floor.max(floor.unwrap_or(0.0)),
        }
    }

    /// Absolute cutoff below which singular values count as zero.
    pub fn threshold(&self, sigma_max: f64, rows: usize, cols: usize) -> f64 {
        (self.tol_scale * rows.max(cols) as f64 * f64::EPSILON * sigma_max).max(self.floor)
    }
}

/// Outcome of a rank decision.
///
/// `smallest_accepted` and `threshold` are populated by floating backends
/// only; exact backends decide by exact zero tests and carry no margin.
#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub rank: usize,
    pub smallest_accepted: Option<f64>,
    pub threshold: Option<f64>,
}

impl RankReport {
    fn exact(rank: usize) -> Self {
        RankReport {
            rank,
            smallest_accepted: None,
            threshold: None,
        }
    }

    /// Ratio of the smallest accepted singular value to the threshold.
    ///
    /// Infinite when the decision was exact, when nothing was accepted, or
    /// when the threshold is zero (empty or exactly zero input).
    pub fn margin(&self) -> f64 {
        match (self.smallest_accepted, self.threshold) {
            (Some(s), Some(t)) if t > 0.0 => s / t,
            _ => f64::INFINITY,
        }
    }
}

/// Result of a row compression `S·A = [A1; 0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Compression<T: Scalar> {
    /// Nonsingular transform `S`, square of size `A.rows()`.
    pub transform: Matrix<T>,
    /// `A1`: the first `rank` rows of `S·A`, of full row rank.
    pub top: Matrix<T>,
    /// Number of zero rows, `A.rows() − rank`.
    pub zero_rows: usize,
    /// The rank decision underlying the split.
    pub report: RankReport,
}

impl<T: Scalar> Compression<T> {
    /// The full compressed matrix `[A1; 0]`, same shape as the input.
    pub fn stacked(&self) -> Matrix<T> {
        self.top
            .vstack(&Matrix::zeros(self.zero_rows, self.top.cols()))
    }
}

/// Scalar types the rank-revealing layer knows how to operate on.
pub trait LinalgScalar: Scalar {
    fn rank_report(a: &Matrix<Self>, tol: &TolPolicy) -> RankReport;

    /// Row compression of an arbitrary rectangular matrix.
    fn row_compress_any(a: &Matrix<Self>, tol: &TolPolicy) -> Compression<Self>;

    /// Inverse of a square matrix, `None` if singular.
    fn try_inverse(a: &Matrix<Self>) -> Option<Matrix<Self>>;

    /// 2-norm condition estimate; `None` on exact backends.
    fn condition_estimate(a: &Matrix<Self>) -> Option<f64>;

    /// QR-orthonormalization of a square matrix; `None` on exact backends,
    /// where unitary transforms are not representable in general.
    fn orthonormalize(a: &Matrix<Self>) -> Option<Matrix<Self>>;
}

/// Rank of a matrix under the backend's decision rule.
pub fn rank_of<T: LinalgScalar>(a: &Matrix<T>, tol: &TolPolicy) -> RankReport {
    T::rank_report(a, tol)
}

/// Row compression of a square matrix: a nonsingular `S` with
/// `S·A = [A1; 0]`, `A1` of full row rank and `m = n − rank(A)` zero rows.
///
/// Floating backends build `S` from the left singular vectors of `A`, so `S`
/// is unitary (orthogonal over the reals) and the bottom `m` rows of `S·A`
/// are set to exactly zero after the fact. Exact backends build `S` by row
/// elimination with recorded pivoting.
pub fn row_compress<T: LinalgScalar>(a: &Matrix<T>, tol: &TolPolicy) -> Result<Compression<T>> {
    if !a.is_square() {
        return Err(Error::shape(format!(
            "row compression is defined for square inputs, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(T::row_compress_any(a, tol))
}

/// Whether a square matrix has full rank under the backend's decision rule.
pub fn is_nonsingular<T: LinalgScalar>(a: &Matrix<T>, tol: &TolPolicy) -> bool {
    a.is_square() && T::rank_report(a, tol).rank == a.rows()
}

/// Columns spanning `{x : xᵀ·A = 0}` (a plain transpose, no conjugation).
///
/// Returns an `n×m` matrix, `m = n − rank(A)`. Floating backends produce an
/// orthonormal spanning set up to roundoff.
pub fn left_null_basis<T: LinalgScalar>(a: &Matrix<T>, tol: &TolPolicy) -> Matrix<T> {
    let comp = T::row_compress_any(a, tol);
    let n = a.rows();
    comp.transform.block(n - comp.zero_rows, n, 0, n).transpose()
}

// ── Exact backend: elimination over an exact field ──────────────────

/// Forward elimination to row echelon form with the transform recorded:
/// returns `(S, S·A, rank)` with the zero rows of `S·A` at the bottom.
fn exact_echelon<T: Scalar>(a: &Matrix<T>) -> (Matrix<T>, Matrix<T>, usize) {
    let (rows, cols) = (a.rows(), a.cols());
    let mut m = a.clone();
    let mut s = Matrix::<T>::identity(rows);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&i| !m.get(i, col).is_zero()) else {
            continue;
        };
        m.swap_rows(pivot, rank);
        s.swap_rows(pivot, rank);
        for i in rank + 1..rows {
            if m.get(i, col).is_zero() {
                continue;
            }
            let factor = m.get(i, col).clone() / m.get(rank, col).clone();
            for j in 0..cols {
                let v = m.get(i, j).clone() - factor.clone() * m.get(rank, j).clone();
                m.set(i, j, v);
            }
            m.set(i, col, T::zero());
            for j in 0..rows {
                let v = s.get(i, j).clone() - factor.clone() * s.get(rank, j).clone();
                s.set(i, j, v);
            }
        }
        rank += 1;
    }
    (s, m, rank)
}

/// Rank by fraction-free (Bareiss) elimination. Over integer entries all
/// intermediates stay integral; over a field the divisions are exact anyway.
fn exact_rank<T: Scalar>(a: &Matrix<T>) -> usize {
    let (rows, cols) = (a.rows(), a.cols());
    let mut m = a.clone();
    let mut rank = 0;
    let mut prev = T::one();
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&i| !m.get(i, col).is_zero()) else {
            continue;
        };
        m.swap_rows(pivot, rank);
        let lead = m.get(rank, col).clone();
        for i in rank + 1..rows {
            let head = m.get(i, col).clone();
            for j in col + 1..cols {
                let v = (lead.clone() * m.get(i, j).clone()
                    - head.clone() * m.get(rank, j).clone())
                    / prev.clone();
                m.set(i, j, v);
            }
            m.set(i, col, T::zero());
        }
        prev = lead;
        rank += 1;
    }
    rank
}

/// Gauss–Jordan inverse; `None` if the matrix is singular.
fn exact_inverse<T: Scalar>(a: &Matrix<T>) -> Option<Matrix<T>> {
    if !a.is_square() {
        return None;
    }
    let n = a.rows();
    let (mut s, mut m, rank) = exact_echelon(a);
    if rank < n {
        return None;
    }
    // m is upper triangular with nonzero diagonal; clear above and rescale.
    for col in (0..n).rev() {
        let pivot = m.get(col, col).clone();
        for j in 0..n {
            let v = s.get(col, j).clone() / pivot.clone();
            s.set(col, j, v);
        }
        for j in col..n {
            let v = m.get(col, j).clone() / pivot.clone();
            m.set(col, j, v);
        }
        for i in 0..col {
            let factor = m.get(i, col).clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..n {
                let v = s.get(i, j).clone() - factor.clone() * s.get(col, j).clone();
                s.set(i, j, v);
            }
            for j in col..n {
                let v = m.get(i, j).clone() - factor.clone() * m.get(col, j).clone();
                m.set(i, j, v);
            }
        }
    }
    Some(s)
}

fn exact_compress<T: Scalar>(a: &Matrix<T>) -> Compression<T> {
    let (s, echelon, rank) = exact_echelon(a);
    Compression {
        transform: s,
        top: echelon.block(0, rank, 0, a.cols()),
        zero_rows: a.rows() - rank,
        report: RankReport::exact(rank),
    }
}

// ── Floating backend: SVD via nalgebra ──────────────────────────────

trait FloatEntry: Scalar + nalgebra::ComplexField<RealField = f64> {}
impl FloatEntry for f64 {}
impl FloatEntry for Complex64 {}

fn to_na<T: FloatEntry>(m: &Matrix<T>) -> DMatrix<T> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j).clone())
}

fn from_na<T: FloatEntry>(m: &DMatrix<T>) -> Matrix<T> {
    Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].clone())
}

/// One-sided Jacobi SVD: right-rotates columns of the input until they are
/// pairwise orthogonal, so the column norms are the singular values and the
/// normalized columns the left singular vectors.
///
/// Chosen over a bidiagonalization SVD for its high relative accuracy: the
/// reduction relies on the near-null left vectors actually annihilating the
/// matrix, and losing that property silently corrupts the staircase.
/// Returns the singular values (descending, `min(rows, cols)` of them) and
/// the corresponding thin left-vector matrix with one column per nonzero
/// singular value.
fn jacobi_left_svd<T: FloatEntry>(a: &DMatrix<T>) -> (Vec<f64>, DMatrix<T>) {
    let rows = a.nrows();
    let cols = a.ncols();
    let mut b = a.clone();
    let eps2 = f64::EPSILON * f64::EPSILON;
    // Columns this small relative to the input are numerically zero: they
    // can never become relatively orthogonal to the live columns (every
    // rotation re-contaminates them at rounding level), so they are frozen
    // and later replaced by the orthonormal completion. The cutoff stays
    // below any rank threshold with `tol_scale ≥ 1`.
    let dead = 0.5 * f64::EPSILON * b.norm();
    const MAX_SWEEPS: usize = 60;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let mut alpha = T::zero();
                let mut app = 0.0;
                let mut aqq = 0.0;
                for k in 0..rows {
                    let bkp = b[(k, p)].clone();
                    let bkq = b[(k, q)].clone();
                    alpha += bkp.clone().conjugate() * bkq.clone();
                    app += nalgebra::ComplexField::modulus_squared(bkp);
                    aqq += nalgebra::ComplexField::modulus_squared(bkq);
                }
                if app.sqrt() <= dead || aqq.sqrt() <= dead {
                    continue;
                }
                let g = nalgebra::ComplexField::modulus(alpha.clone());
                if g * g <= eps2 * app * aqq || g == 0.0 {
                    continue;
                }
                rotated = true;
                let tau = (aqq - app) / (2.0 * g);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                // Column q carries the phase of <b_p, b_q>.
                let phase = alpha * <T as nalgebra::ComplexField>::from_real(1.0 / g);
                let cs_t = <T as nalgebra::ComplexField>::from_real(cs);
                let sn_t = <T as nalgebra::ComplexField>::from_real(sn);
                for k in 0..rows {
                    let bkp = b[(k, p)].clone();
                    let bkq = b[(k, q)].clone();
                    b[(k, p)] = cs_t.clone() * bkp.clone()
                        - sn_t.clone() * phase.clone().conjugate() * bkq.clone();
                    b[(k, q)] = sn_t.clone() * phase.clone() * bkp + cs_t.clone() * bkq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..cols).collect();
    let norms: Vec<f64> = (0..cols).map(|j| b.column(j).norm()).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).expect("finite norms"));
    let sigmas: Vec<f64> = order
        .iter()
        .take(rows.min(cols))
        .map(|&j| norms[j])
        .collect();
    let live: Vec<nalgebra::DVector<T>> = order
        .iter()
        .take(rows.min(cols))
        .filter(|&&j| norms[j] > dead)
        .map(|&j| {
            let scale: T = nalgebra::ComplexField::from_real(1.0 / norms[j]);
            b.column(j).into_owned() * scale
        })
        .collect();
    let u_thin = if live.is_empty() {
        DMatrix::zeros(rows, 0)
    } else {
        DMatrix::from_columns(&live)
    };
    (sigmas, u_thin)
}

fn float_rank<T: FloatEntry>(a: &Matrix<T>, tol: &TolPolicy) -> RankReport {
    if a.rows() == 0 || a.cols() == 0 {
        return RankReport {
            rank: 0,
            smallest_accepted: None,
            threshold: Some(0.0),
        };
    }
    let (sv, _) = jacobi_left_svd(&to_na(a));
    report_from_singular_values(&sv, a.rows(), a.cols(), tol)
}

fn report_from_singular_values(
    sv: &[f64],
    rows: usize,
    cols: usize,
    tol: &TolPolicy,
) -> RankReport {
    let sigma_max = sv.iter().copied().fold(0.0, f64::max);
    let threshold = tol.threshold(sigma_max, rows, cols);
    let accepted: Vec<f64> = sv.iter().copied().filter(|&s| s > threshold).collect();
    RankReport {
        rank: accepted.len(),
        smallest_accepted: accepted.iter().copied().reduce(f64::min),
        threshold: Some(threshold),
    }
}

/// Extends `k` orthonormal columns to an orthonormal basis of the full
/// space, picking at each stage the standard basis vector with the largest
/// residual after projection (re-orthogonalized twice).
fn complete_orthonormal<T: FloatEntry>(u: &DMatrix<T>) -> DMatrix<T> {
    let n = u.nrows();
    let mut cols: Vec<DVector<T>> = (0..u.ncols()).map(|j| u.column(j).into_owned()).collect();
    while cols.len() < n {
        let mut best: Option<(f64, DVector<T>)> = None;
        for j in 0..n {
            let mut v = DVector::<T>::zeros(n);
            v[j] = T::one();
            for _ in 0..2 {
                for c in &cols {
                    let coef = c.dotc(&v);
                    v -= c * coef;
                }
            }
            let norm = v.norm();
            if best.as_ref().is_none_or(|(b, _)| norm > *b) {
                best = Some((norm, v));
            }
        }
        let (norm, v) = best.expect("candidate basis vector");
        let scale: T = nalgebra::ComplexField::from_real(norm);
        cols.push(v / scale);
    }
    DMatrix::from_columns(&cols)
}

fn float_compress<T: FloatEntry>(a: &Matrix<T>, tol: &TolPolicy) -> Compression<T> {
    let (rows, cols) = (a.rows(), a.cols());
    if rows == 0 || cols == 0 {
        return Compression {
            transform: Matrix::identity(rows),
            top: Matrix::zeros(0, cols),
            zero_rows: rows,
            report: RankReport {
                rank: 0,
                smallest_accepted: None,
                threshold: Some(0.0),
            },
        };
    }
    let na = to_na(a);
    let (sv, u_thin) = jacobi_left_svd(&na);
    let report = report_from_singular_values(&sv, rows, cols, tol);
    let rank = report.rank;
    let u_full = if u_thin.ncols() == rows {
        u_thin
    } else {
        complete_orthonormal(&u_thin)
    };
    let s = u_full.adjoint();
    let compressed = &s * &na;
    let top = Matrix::from_fn(rank, cols, |i, j| compressed[(i, j)].clone());
    Compression {
        transform: from_na(&s),
        top,
        zero_rows: rows - rank,
        report,
    }
}

fn float_inverse<T: FloatEntry>(a: &Matrix<T>) -> Option<Matrix<T>> {
    if !a.is_square() {
        return None;
    }
    if a.rows() == 0 {
        return Some(Matrix::empty());
    }
    to_na(a).try_inverse().map(|inv| from_na(&inv))
}

fn float_condition<T: FloatEntry>(a: &Matrix<T>) -> f64 {
    if a.rows() == 0 || a.cols() == 0 {
        return 1.0;
    }
    let (sv, _) = jacobi_left_svd(&to_na(a));
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn float_orthonormalize<T: FloatEntry>(a: &Matrix<T>) -> Matrix<T> {
    if a.rows() == 0 {
        return Matrix::empty();
    }
    from_na(&to_na(a).qr().q())
}

macro_rules! impl_linalg_float {
    ($t:ty) => {
        impl LinalgScalar for $t {
            fn rank_report(a: &Matrix<Self>, tol: &TolPolicy) -> RankReport {
                float_rank(a, tol)
            }

            fn row_compress_any(a: &Matrix<Self>, tol: &TolPolicy) -> Compression<Self> {
                float_compress(a, tol)
            }

            fn try_inverse(a: &Matrix<Self>) -> Option<Matrix<Self>> {
                float_inverse(a)
            }

            fn condition_estimate(a: &Matrix<Self>) -> Option<f64> {
                Some(float_condition(a))
            }

            fn orthonormalize(a: &Matrix<Self>) -> Option<Matrix<Self>> {
                Some(float_orthonormalize(a))
            }
        }
    };
}

macro_rules! impl_linalg_exact {
    ($t:ty) => {
        impl LinalgScalar for $t {
            fn rank_report(a: &Matrix<Self>, _tol: &TolPolicy) -> RankReport {
                RankReport::exact(exact_rank(a))
            }

            fn row_compress_any(a: &Matrix<Self>, _tol: &TolPolicy) -> Compression<Self> {
                exact_compress(a)
            }

            fn try_inverse(a: &Matrix<Self>) -> Option<Matrix<Self>> {
                exact_inverse(a)
            }

            fn condition_estimate(_a: &Matrix<Self>) -> Option<f64> {
                None
            }

            fn orthonormalize(_a: &Matrix<Self>) -> Option<Matrix<Self>> {
                None
            }
        }
    };
}

impl_linalg_float!(f64);
impl_linalg_float!(Complex64);
impl_linalg_exact!(BigRational);
impl_linalg_exact!(GaussianRational);
