//! Seeded generation of test instances with known decompositions.
//!
//! An instance is built the way the theory says it must look (a nonsingular
//! regular part direct-summed with nilpotent Jordan blocks) and then hidden
//! behind a congruence scramble. The prescribed structure is returned as
//! ground truth, so recovery by the reduction engine can be checked against
//! it.
//!
//! All randomness flows through a ChaCha12 stream seeded from the spec, so
//! instances are reproducible across platforms; the generator identifier
//! ([`GENERATOR_ID`]) is part of the public contract and recorded in file
//! metadata by the CLI.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::{direct_sum, jordan_block, Matrix};
use crate::rank::{is_nonsingular, LinalgScalar, TolPolicy};
use crate::reduction::{m_sequence_for_blocks, RegularizingDecomposition};
use crate::scalar::{Complex64, FormKind, GaussianRational, Scalar};

/// Identifier of the pseudo-random generator backing all sampling here.
pub const GENERATOR_ID: &str = "chacha12";

/// Condition-number cap for floating nonsingular samples.
const MAX_CONDITION: f64 = 1e6;

/// How the prescribed direct sum gets hidden.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scramble {
    /// Return the direct sum as is.
    None,
    /// Congruence by a random unitary (orthogonal) matrix; floating only.
    Unitary,
    /// Congruence by a random nonsingular matrix.
    GeneralNonsingular,
}

/// Recipe for one synthetic instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthesisSpec {
    pub regular_size: usize,
    /// Singular Jordan block sizes (any order; normalized descending).
    pub blocks: Vec<usize>,
    pub scramble: Scramble,
    pub seed: u64,
    /// Magnitude bound for integer entries on exact backends.
    pub entry_bound: i64,
}

impl SynthesisSpec {
    pub fn total_size(&self) -> usize {
        self.regular_size + self.blocks.iter().sum::<usize>()
    }
}

/// Sampling of matrix entries for the scrambling transforms: bounded
/// integers on exact backends, standard normals on floating ones.
pub trait SampleScalar: LinalgScalar {
    fn sample_entry(rng: &mut ChaCha12Rng, entry_bound: i64) -> Self;
}

impl SampleScalar for f64 {
    fn sample_entry(rng: &mut ChaCha12Rng, _entry_bound: i64) -> Self {
        rng.sample(StandardNormal)
    }
}

impl SampleScalar for Complex64 {
    fn sample_entry(rng: &mut ChaCha12Rng, _entry_bound: i64) -> Self {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    }
}

impl SampleScalar for BigRational {
    fn sample_entry(rng: &mut ChaCha12Rng, entry_bound: i64) -> Self {
        BigRational::from_i64(rng.random_range(-entry_bound..=entry_bound))
    }
}

impl SampleScalar for GaussianRational {
    fn sample_entry(rng: &mut ChaCha12Rng, entry_bound: i64) -> Self {
        let re = rng.random_range(-entry_bound..=entry_bound);
        let im = rng.random_range(-entry_bound..=entry_bound);
        GaussianRational::new(BigRational::from_i64(re), BigRational::from_i64(im))
    }
}

fn sample_matrix<T: SampleScalar>(n: usize, rng: &mut ChaCha12Rng, bound: i64) -> Matrix<T> {
    Matrix::from_fn(n, n, |_, _| T::sample_entry(rng, bound))
}

fn sample_nonsingular_with<T: SampleScalar>(
    n: usize,
    rng: &mut ChaCha12Rng,
    entry_bound: i64,
    tol: &TolPolicy,
) -> Matrix<T> {
    assert!(entry_bound >= 1, "entry bound must be positive");
    loop {
        let m = sample_matrix(n, rng, entry_bound);
        let acceptable = match T::condition_estimate(&m) {
            Some(cond) => cond <= MAX_CONDITION,
            None => is_nonsingular(&m, tol),
        };
        if acceptable {
            return m;
        }
    }
}

fn sample_unitary_with<T: SampleScalar>(n: usize, rng: &mut ChaCha12Rng) -> Result<Matrix<T>> {
    let g = sample_matrix::<T>(n, rng, 1);
    T::orthonormalize(&g).ok_or_else(|| {
        Error::Unsupported(
            "unitary sampling needs a floating backend; use a general nonsingular scramble"
                .into(),
        )
    })
}

/// A seeded random nonsingular `n×n` matrix.
///
/// Exact backends draw integer entries in `[−entry_bound, entry_bound]` and
/// resample until exactly nonsingular; floating backends draw Gaussian
/// entries and resample while the condition estimate exceeds `1e6`.
pub fn random_nonsingular<T: SampleScalar>(n: usize, seed: u64, entry_bound: i64) -> Matrix<T> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    sample_nonsingular_with(n, &mut rng, entry_bound, &TolPolicy::default())
}

/// A seeded random unitary (complex) or orthogonal (real) `n×n` matrix,
/// obtained by orthonormalizing a Gaussian sample. Floating backends only.
pub fn random_unitary<T: SampleScalar>(n: usize, seed: u64) -> Result<Matrix<T>> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    sample_unitary_with(n, &mut rng)
}

/// Builds `T·(R ⊕ J_blocks)·T^⋆` with `T` chosen per the scramble mode, and
/// returns the prescribed decomposition as ground truth.
///
/// A caller-supplied regular part must be square of size `regular_size` and
/// nonsingular; otherwise one is sampled from the spec's seed.
pub fn synthesize<T: SampleScalar>(
    spec: &SynthesisSpec,
    regular: Option<Matrix<T>>,
    form: FormKind,
    tol: &TolPolicy,
) -> Result<(Matrix<T>, RegularizingDecomposition<T>)> {
    form.check_supported::<T>()?;
    if spec.blocks.contains(&0) {
        return Err(Error::Domain("block sizes must be positive".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let regular = match regular {
        Some(r) => {
            if !r.is_square() || r.rows() != spec.regular_size {
                return Err(Error::precondition(format!(
                    "supplied regular part is {}x{}, spec says {}",
                    r.rows(),
                    r.cols(),
                    spec.regular_size
                )));
            }
            if !is_nonsingular(&r, tol) {
                return Err(Error::precondition("supplied regular part is singular"));
            }
            r
        }
        None => sample_nonsingular_with(spec.regular_size, &mut rng, spec.entry_bound, tol),
    };

    let mut blocks = spec.blocks.clone();
    blocks.sort_unstable_by(|x, y| y.cmp(x));
    let mut parts = vec![regular.clone()];
    for &size in &blocks {
        parts.push(jordan_block(size)?);
    }
    let plain = direct_sum(&parts)?;

    let instance = match spec.scramble {
        Scramble::None => plain,
        Scramble::Unitary => {
            let t = sample_unitary_with::<T>(plain.rows(), &mut rng)?;
            &(&t * &plain) * &t.star_unchecked(form)
        }
        Scramble::GeneralNonsingular => {
            let t = sample_nonsingular_with::<T>(plain.rows(), &mut rng, spec.entry_bound, tol);
            &(&t * &plain) * &t.star_unchecked(form)
        }
    };

    let truth = RegularizingDecomposition {
        regular,
        m_sequence: m_sequence_for_blocks(&blocks),
        blocks,
    };
    Ok((instance, truth))
}
