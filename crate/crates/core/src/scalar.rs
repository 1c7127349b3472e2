//! Scalar backends: the four concrete entry types matrices are built from.
//!
//! Arithmetic comes in two flavours. `Exact` scalars are arbitrary-precision
//! rationals (real) or Gaussian rationals (complex) where every comparison is
//! exact. `Float` scalars are IEEE doubles or complex pairs of doubles where
//! structural decisions go through singular-value thresholds instead.

use std::fmt;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Double-precision complex scalar.
pub type Complex64 = Complex<f64>;

/// Exact complex scalar: rational real and imaginary parts.
pub type GaussianRational = Complex<BigRational>;

/// Ground field of the scalars.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Real,
    Complex,
}

/// Arithmetic model of the scalars.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arithmetic {
    Exact,
    Float,
}

/// Field plus arithmetic: identifies one of the four scalar backends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScalarSpec {
    pub field: Field,
    pub arithmetic: Arithmetic,
}

impl ScalarSpec {
    pub fn of<T: Scalar>() -> Self {
        ScalarSpec {
            field: T::FIELD,
            arithmetic: T::ARITHMETIC,
        }
    }
}

impl fmt::Display for ScalarSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let field = match self.field {
            Field::Real => "real",
            Field::Complex => "complex",
        };
        let arith = match self.arithmetic {
            Arithmetic::Exact => "exact",
            Arithmetic::Float => "float",
        };
        write!(f, "{field} {arith}")
    }
}

/// Kind of form a matrix represents; fixes the star operation.
///
/// Bilinear forms transform by `S·A·Sᵀ`, sesquilinear forms by `S·A·S^*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormKind {
    Bilinear,
    Sesquilinear,
}

impl FormKind {
    /// A sesquilinear form needs a complex scalar type; over the reals the
    /// involution collapses to the identity and the form is bilinear.
    pub fn check_supported<T: Scalar>(self) -> Result<()> {
        if self == FormKind::Sesquilinear && T::FIELD == Field::Real {
            return Err(Error::InvalidForm(
                "sesquilinear form requires a complex scalar type".into(),
            ));
        }
        Ok(())
    }
}

impl fmt::Display for FormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormKind::Bilinear => write!(f, "bilinear"),
            FormKind::Sesquilinear => write!(f, "sesquilinear"),
        }
    }
}

/// Entry type usable in a [`crate::Matrix`].
///
/// The trait only assumes field arithmetic; everything rank-related lives in
/// [`crate::rank::LinalgScalar`] so that exact and floating backends can
/// diverge where they must.
pub trait Scalar:
    Num + Neg<Output = Self> + Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    const FIELD: Field;
    const ARITHMETIC: Arithmetic;

    fn from_i64(n: i64) -> Self;

    /// Complex conjugate; the identity on real scalars.
    fn conj(&self) -> Self;

    /// Magnitude as an `f64`. Approximate for exact scalars; used only for
    /// diagnostics and floating tolerance scaling, never for exact decisions.
    fn abs_f64(&self) -> f64;
}

impl Scalar for f64 {
    const FIELD: Field = Field::Real;
    const ARITHMETIC: Arithmetic = Arithmetic::Float;

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn conj(&self) -> Self {
        *self
    }

    fn abs_f64(&self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    const FIELD: Field = Field::Complex;
    const ARITHMETIC: Arithmetic = Arithmetic::Float;

    fn from_i64(n: i64) -> Self {
        Complex::new(n as f64, 0.0)
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn abs_f64(&self) -> f64 {
        self.norm()
    }
}

impl Scalar for BigRational {
    const FIELD: Field = Field::Real;
    const ARITHMETIC: Arithmetic = Arithmetic::Exact;

    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn conj(&self) -> Self {
        self.clone()
    }

    fn abs_f64(&self) -> f64 {
        self.to_f64().map(f64::abs).unwrap_or(f64::INFINITY)
    }
}

impl Scalar for GaussianRational {
    const FIELD: Field = Field::Complex;
    const ARITHMETIC: Arithmetic = Arithmetic::Exact;

    fn from_i64(n: i64) -> Self {
        Complex::new(BigRational::from_i64(n), BigRational::zero())
    }

    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }

    fn abs_f64(&self) -> f64 {
        let norm_sqr = &self.re * &self.re + &self.im * &self.im;
        norm_sqr.to_f64().map(f64::sqrt).unwrap_or(f64::INFINITY)
    }
}
