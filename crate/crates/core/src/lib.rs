//! Lattice basis reduction with deep insertions.
//!
//! The crate provides LLL, DeepLLL, BKZ and the potential-driven PotLLL
//! variants over arbitrary-precision integer bases (and `f64` bases for
//! numerical experiments), together with reducedness oracles, a random
//! lattice generator, an fplll-compatible file format and a benchmark
//! harness.

// `!(x > 0.0)` and friends are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bkz;
pub mod deep_lll;
pub mod enumeration;
pub mod error;
pub mod exact;
pub mod float;
pub mod gso;
pub mod harness;
pub mod insertion;
pub mod io;
pub mod latgen;
pub mod lll;
pub mod pot_lll;
pub mod potential;
mod scalar;
pub mod types;
pub mod verify;

pub use bkz::{bkz_reduce, is_bkz_reduced};
pub use deep_lll::{deep_lll_reduce, is_deep_reduced};
pub use enumeration::{svp_enumerate, EnumResult};
pub use error::{LatticeError, Result};
pub use float::{ExtFloat, FloatKind, GsoFloat};
pub use gso::{compute_gso, GsoState};
pub use harness::{
    aggregate, hermite_root_factor, run_bench, worst_case_bound, AggregateRow, Algo, BenchPlan, BenchRecord,
    BenchReport,
};
pub use insertion::{insertion_bound, log_potential_ratio, potential_ratio_scan, PotentialRatioRow};
pub use io::{format_basis, parse_basis, read_basis, write_basis};
pub use latgen::{critical_basis, generate_random_hnf, CriticalBasisSpec, GenSpec};
pub use lll::{is_lll_reduced, lll_reduce};
pub use pot_lll::{is_pot_reduced, is_pot_reduced_exact, pot_lll_reduce};
pub use potential::{log_potential, log_volume, volume};
pub use types::{Basis, Entry, FloatConfig, InsertionStrategy, IntBasis, RealBasis, ReductionParams, ReductionStats};
pub use verify::{Reducedness, Violation};
