//! Shared instance builders for the benchmarks.

use formreg::{
    synthesize, FormKind, Matrix, SampleScalar, Scramble, SynthesisSpec, TolPolicy,
};

/// A scrambled instance with roughly half its size in singular blocks.
pub fn scrambled_instance<T: SampleScalar>(size: usize, scramble: Scramble, seed: u64) -> Matrix<T> {
    let regular_size = size / 2;
    let mut blocks = Vec::new();
    let mut budget = size - regular_size;
    let mut next = 3usize;
    while budget > 0 {
        let b = next.min(budget);
        blocks.push(b);
        budget -= b;
        next = if next == 1 { 3 } else { next - 1 };
    }
    let spec = SynthesisSpec {
        regular_size,
        blocks,
        scramble,
        seed,
        entry_bound: 3,
    };
    synthesize::<T>(&spec, None, FormKind::Bilinear, &TolPolicy::default())
        .expect("valid spec")
        .0
}
