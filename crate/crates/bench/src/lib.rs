//! Shared inputs for the criterion benchmarks.

use potlll_core::{generate_random_hnf, lll_reduce, GenSpec, IntBasis, ReductionParams};

/// The generated HNF basis for `(dim, seed)`.
pub fn raw_basis(dim: usize, seed: u64) -> IntBasis {
    generate_random_hnf(&GenSpec::new(dim, seed)).expect("valid generator spec")
}

/// The same basis after 0.99-LLL, the usual starting point of the main phases.
pub fn lll_basis(dim: usize, seed: u64) -> IntBasis {
    let mut b = raw_basis(dim, seed);
    lll_reduce(&mut b, &ReductionParams::default()).expect("LLL on a generated basis");
    b
}
