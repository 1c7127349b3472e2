//! Matrix file format and the type-erased matrix wrapper.
//!
//! The text format is one header line `field arithmetic rows cols` followed
//! by `rows × cols` whitespace-separated entries in row-major order. Exact
//! entries are integer or fraction literals (`-3`, `7/2`), floating entries
//! decimal with 17 significant digits so they round-trip bit-identically,
//! and complex entries `re+imi` (`1/2-3/4i`, `1.5e0+2.0e0i`).

use std::str::FromStr;

use formreg::{Arithmetic, Complex64, Field, GaussianRational, Matrix, SampleScalar, ScalarSpec};
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::CliError;

/// Scalar types the CLI can read and write.
pub trait EntryScalar: SampleScalar {
    fn write_literal(&self) -> String;
    fn parse_literal(token: &str) -> Result<Self, String>;
}

impl EntryScalar for f64 {
    fn write_literal(&self) -> String {
        format!("{self:.16e}")
    }

    fn parse_literal(token: &str) -> Result<Self, String> {
        let v = f64::from_str(token).map_err(|e| e.to_string())?;
        if !v.is_finite() {
            return Err(format!("non-finite entry `{token}`"));
        }
        Ok(v)
    }
}

impl EntryScalar for Complex64 {
    fn write_literal(&self) -> String {
        format!("{self:.16e}")
    }

    fn parse_literal(token: &str) -> Result<Self, String> {
        let v = Complex64::from_str(token).map_err(|e| e.to_string())?;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(format!("non-finite entry `{token}`"));
        }
        Ok(v)
    }
}

impl EntryScalar for BigRational {
    fn write_literal(&self) -> String {
        self.to_string()
    }

    fn parse_literal(token: &str) -> Result<Self, String> {
        BigRational::from_str(token).map_err(|e| format!("bad rational `{token}`: {e}"))
    }
}

impl EntryScalar for GaussianRational {
    fn write_literal(&self) -> String {
        self.to_string()
    }

    fn parse_literal(token: &str) -> Result<Self, String> {
        GaussianRational::from_str(token).map_err(|e| format!("bad complex rational `{token}`: {e:?}"))
    }
}

/// A matrix over any of the four scalar backends.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyMatrix {
    RealFloat(Matrix<f64>),
    RealExact(Matrix<BigRational>),
    ComplexFloat(Matrix<Complex64>),
    ComplexExact(Matrix<GaussianRational>),
}

/// Runs `$body` with `$m` bound to the typed matrix inside an [`AnyMatrix`].
macro_rules! with_matrix {
    ($any:expr, |$m:ident| $body:expr) => {
        match $any {
            $crate::io::AnyMatrix::RealFloat($m) => $body,
            $crate::io::AnyMatrix::RealExact($m) => $body,
            $crate::io::AnyMatrix::ComplexFloat($m) => $body,
            $crate::io::AnyMatrix::ComplexExact($m) => $body,
        }
    };
}
pub(crate) use with_matrix;

impl AnyMatrix {
    pub fn spec(&self) -> ScalarSpec {
        match self {
            AnyMatrix::RealFloat(_) => spec(Field::Real, Arithmetic::Float),
            AnyMatrix::RealExact(_) => spec(Field::Real, Arithmetic::Exact),
            AnyMatrix::ComplexFloat(_) => spec(Field::Complex, Arithmetic::Float),
            AnyMatrix::ComplexExact(_) => spec(Field::Complex, Arithmetic::Exact),
        }
    }

    pub fn rows(&self) -> usize {
        with_matrix!(self, |m| m.rows())
    }

    pub fn cols(&self) -> usize {
        with_matrix!(self, |m| m.cols())
    }

    /// Converts to the requested arithmetic, keeping the field. Exact to
    /// float rounds to nearest; float to exact is lossless.
    pub fn convert_arithmetic(self, target: Arithmetic) -> Result<AnyMatrix, CliError> {
        Ok(match (self, target) {
            (m @ AnyMatrix::RealFloat(_), Arithmetic::Float) => m,
            (m @ AnyMatrix::ComplexFloat(_), Arithmetic::Float) => m,
            (m @ AnyMatrix::RealExact(_), Arithmetic::Exact) => m,
            (m @ AnyMatrix::ComplexExact(_), Arithmetic::Exact) => m,
            (AnyMatrix::RealExact(m), Arithmetic::Float) => {
                AnyMatrix::RealFloat(try_map(&m, rational_to_f64)?)
            }
            (AnyMatrix::ComplexExact(m), Arithmetic::Float) => {
                AnyMatrix::ComplexFloat(try_map(&m, |z| {
                    Ok(Complex64::new(rational_to_f64(&z.re)?, rational_to_f64(&z.im)?))
                })?)
            }
            (AnyMatrix::RealFloat(m), Arithmetic::Exact) => {
                AnyMatrix::RealExact(try_map(&m, |x| f64_to_rational(*x))?)
            }
            (AnyMatrix::ComplexFloat(m), Arithmetic::Exact) => {
                AnyMatrix::ComplexExact(try_map(&m, |z| {
                    Ok(GaussianRational::new(f64_to_rational(z.re)?, f64_to_rational(z.im)?))
                })?)
            }
        })
    }
}

fn spec(field: Field, arithmetic: Arithmetic) -> ScalarSpec {
    ScalarSpec { field, arithmetic }
}

fn rational_to_f64(q: &BigRational) -> Result<f64, CliError> {
    q.to_f64()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Parse("rational entry overflows f64".into()))
}

fn f64_to_rational(x: f64) -> Result<BigRational, CliError> {
    BigRational::from_float(x)
        .ok_or_else(|| CliError::Parse("non-finite float entry cannot become exact".into()))
}

fn try_map<T: EntryScalar, U: EntryScalar>(
    m: &Matrix<T>,
    f: impl Fn(&T) -> Result<U, CliError>,
) -> Result<Matrix<U>, CliError> {
    let mut entries = Vec::with_capacity(m.rows() * m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            entries.push(f(m.get(i, j))?);
        }
    }
    Ok(Matrix::new(m.rows(), m.cols(), entries).expect("shape preserved"))
}

pub fn field_token(field: Field) -> &'static str {
    match field {
        Field::Real => "real",
        Field::Complex => "complex",
    }
}

pub fn arithmetic_token(arithmetic: Arithmetic) -> &'static str {
    match arithmetic {
        Arithmetic::Exact => "exact",
        Arithmetic::Float => "float",
    }
}

pub fn parse_field(token: &str) -> Result<Field, CliError> {
    match token {
        "real" => Ok(Field::Real),
        "complex" => Ok(Field::Complex),
        other => Err(CliError::Parse(format!("unknown field `{other}`"))),
    }
}

pub fn parse_arithmetic(token: &str) -> Result<Arithmetic, CliError> {
    match token {
        "exact" => Ok(Arithmetic::Exact),
        "float" => Ok(Arithmetic::Float),
        other => Err(CliError::Parse(format!("unknown arithmetic `{other}`"))),
    }
}

/// Parses the text matrix format.
pub fn parse_matrix_text(text: &str) -> Result<AnyMatrix, CliError> {
    let mut tokens = text.split_whitespace();
    let mut next = |what: &str| {
        tokens
            .next()
            .ok_or_else(|| CliError::Parse(format!("missing {what} in header")))
    };
    let field = parse_field(next("field")?)?;
    let arithmetic = parse_arithmetic(next("arithmetic")?)?;
    let rows: usize = next("row count")?
        .parse()
        .map_err(|_| CliError::Parse("bad row count".into()))?;
    let cols: usize = next("column count")?
        .parse()
        .map_err(|_| CliError::Parse("bad column count".into()))?;
    let body: Vec<&str> = tokens.collect();
    if body.len() != rows * cols {
        return Err(CliError::Parse(format!(
            "expected {} entries for a {rows}x{cols} matrix, found {}",
            rows * cols,
            body.len()
        )));
    }
    fn build<T: EntryScalar>(rows: usize, cols: usize, body: &[&str]) -> Result<Matrix<T>, CliError> {
        let mut entries = Vec::with_capacity(body.len());
        for token in body {
            entries.push(T::parse_literal(token).map_err(CliError::Parse)?);
        }
        Ok(Matrix::new(rows, cols, entries).expect("counted above"))
    }
    Ok(match (field, arithmetic) {
        (Field::Real, Arithmetic::Float) => AnyMatrix::RealFloat(build(rows, cols, &body)?),
        (Field::Real, Arithmetic::Exact) => AnyMatrix::RealExact(build(rows, cols, &body)?),
        (Field::Complex, Arithmetic::Float) => AnyMatrix::ComplexFloat(build(rows, cols, &body)?),
        (Field::Complex, Arithmetic::Exact) => AnyMatrix::ComplexExact(build(rows, cols, &body)?),
    })
}

/// Canonical text serialization: header line, then one row per line.
pub fn write_matrix_text(any: &AnyMatrix) -> String {
    let spec = any.spec();
    let mut out = format!(
        "{} {} {} {}\n",
        field_token(spec.field),
        arithmetic_token(spec.arithmetic),
        any.rows(),
        any.cols()
    );
    with_matrix!(any, |m| {
        for i in 0..m.rows() {
            let row: Vec<String> = (0..m.cols()).map(|j| m.get(i, j).write_literal()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    });
    out
}

/// Digest of the canonical serialization; whitespace variations in the
/// source file do not affect it.
pub fn digest(any: &AnyMatrix) -> String {
    let text = write_matrix_text(any);
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in text.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("fnv1a64:{hash:016x}")
}

pub fn read_matrix_file(path: &std::path::Path) -> Result<AnyMatrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    parse_matrix_text(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}
