//! Dense row-major matrices over any [`Scalar`] backend.
//!
//! Empty matrices (`0×0`, `0×n`, `n×0`) are ordinary values throughout: the
//! reduction loop shrinks its working matrix and routinely terminates on a
//! `0×0` regular part.

use std::fmt;
use std::ops::{Index, Mul};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{FormKind, Scalar};

/// Dense matrix with row-major storage.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    /// Builds a matrix from row-major entries; the count must match.
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::shape(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from rows of equal length.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::shape("rows of unequal length".to_string()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor from integer entries.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&v| T::from_i64(v)).collect())
                .collect(),
        )
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    /// The empty `0×0` matrix.
    pub fn empty() -> Self {
        Matrix {
            rows: 0,
            cols: 0,
            data: Vec::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix.
    pub fn size(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.cols + j] = value;
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn conjugate(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).conj())
    }

    /// The star of the matrix: transpose for bilinear forms, conjugate
    /// transpose for sesquilinear ones. Dimensions swap.
    pub fn star(&self, form: FormKind) -> Result<Self> {
        form.check_supported::<T>()?;
        Ok(self.star_unchecked(form))
    }

    /// Star without the form/field compatibility check; callers must have
    /// validated the form against `T::FIELD` already.
    pub(crate) fn star_unchecked(&self, form: FormKind) -> Self {
        match form {
            FormKind::Bilinear => self.transpose(),
            FormKind::Sesquilinear => Self::from_fn(self.cols, self.rows, |i, j| {
                self.get(j, i).conj()
            }),
        }
    }

    /// Copies the block with rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        assert!(r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols);
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    /// Stacks `self` on top of `below`; column counts must agree.
    pub fn vstack(&self, below: &Self) -> Self {
        assert_eq!(self.cols, below.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&below.data);
        Matrix {
            rows: self.rows + below.rows,
            cols: self.cols,
            data,
        }
    }

    /// Largest entry magnitude as `f64`; `0.0` for empty matrices.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Scalar::abs_f64).fold(0.0, f64::max)
    }

    /// Frobenius norm as `f64` (approximate for exact scalars).
    pub fn fro_norm(&self) -> f64 {
        self.data
            .iter()
            .map(|x| {
                let a = x.abs_f64();
                a * a
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Entrywise exact zero test.
    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Largest entry magnitude of `self − other`; `None` on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return None;
        }
        Some(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a.clone() - b.clone()).abs_f64())
                .fold(0.0, f64::max),
        )
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T: Scalar> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        self.get(i, j)
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(
            self.cols, rhs.rows,
            "dimension mismatch in matrix product: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        Matrix::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                acc = acc + self.get(i, k).clone() * rhs.get(k, j).clone();
            }
            acc
        })
    }
}

impl<T: Scalar> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "] ({}x{})", self.rows, self.cols)
    }
}

impl<T: Scalar> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Block-diagonal sum of square matrices. The empty list gives `0×0`.
pub fn direct_sum<T: Scalar>(blocks: &[Matrix<T>]) -> Result<Matrix<T>> {
    for (idx, b) in blocks.iter().enumerate() {
        if !b.is_square() {
            return Err(Error::shape(format!(
                "direct sum block {} is {}x{}, expected square",
                idx,
                b.rows(),
                b.cols()
            )));
        }
    }
    let total: usize = blocks.iter().map(Matrix::size).sum();
    let mut out = Matrix::zeros(total, total);
    let mut offset = 0;
    for b in blocks {
        for i in 0..b.size() {
            for j in 0..b.size() {
                out.set(offset + i, offset + j, b.get(i, j).clone());
            }
        }
        offset += b.size();
    }
    Ok(out)
}

/// The `n×n` singular Jordan block: ones on the first superdiagonal,
/// eigenvalue zero. Requires `n ≥ 1`; a size-zero block is just the empty
/// direct sum.
pub fn jordan_block<T: Scalar>(n: usize) -> Result<Matrix<T>> {
    if n == 0 {
        return Err(Error::Domain(
            "jordan block size must be at least 1".into(),
        ));
    }
    Ok(Matrix::from_fn(n, n, |i, j| {
        if j == i + 1 {
            T::one()
        } else {
            T::zero()
        }
    }))
}
