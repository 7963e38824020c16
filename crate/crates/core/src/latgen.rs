//! Deterministic lattice instances: random HNF bases and the critical bases.
//!
//! # Random HNF bases
//!
//! For `dim = n`, `bits` and `seed`, the basis is
//!
//! ```text
//! [ p    0 0 ... 0 ]
//! [ x_2  1 0 ... 0 ]
//! [ x_3  0 1 ... 0 ]
//! [ ...            ]
//! [ x_n  0 0 ... 1 ]
//! ```
//!
//! where `p` is the smallest prime `>= 2^bits` (probable-prime test) and the
//! `x_i` are drawn in order `i = 2..n` uniformly from `[0, p)`.
//!
//! The generator is SplitMix64 with its 64-bit state set to `seed`. Each call
//! adds `0x9e3779b97f4a7c15` to the state (wrapping) and returns
//! `z ^ (z >> 31)` after `z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9` and
//! `z = (z ^ (z >> 27)) * 0x94d049bb133111eb` (wrapping products). A draw
//! from `[0, p)` takes `w = ceil(L / 64)` outputs, `L` the bit length of `p`,
//! and assembles them little-endian (first output is the least significant
//! word), clears every bit at position `>= L`, and retries on a value `>= p`.

use num_bigint::{BigInt, BigUint};
use num_prime::nt_funcs::{is_prime, next_prime};
use num_traits::{One, Zero};
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{LatticeError, Result};
use crate::types::{Basis, IntBasis, RealBasis};

/// Parameters of a random HNF instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenSpec {
    pub dim: usize,
    pub seed: u64,
    /// Bit length parameter of the modulus `p`.
    pub bits: u64,
}

impl GenSpec {
    /// `bits` defaults to `10 * dim`.
    pub fn new(dim: usize, seed: u64) -> Self {
        GenSpec { dim, seed, bits: 10 * dim as u64 }
    }

    pub fn with_bits(mut self, bits: u64) -> Self {
        self.bits = bits;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(LatticeError::InvalidParams(format!("dimension must be at least 2, got {}", self.dim)));
        }
        if self.bits < self.dim as u64 {
            return Err(LatticeError::InvalidParams(format!(
                "bits ({}) must be at least the dimension ({})",
                self.bits, self.dim
            )));
        }
        Ok(())
    }
}

/// Smallest probable prime `>= 2^bits`.
pub fn hnf_modulus(bits: u64) -> BigUint {
    let start = BigUint::one() << bits;
    if is_prime(&start, None).probably() {
        return start;
    }
    next_prime(&start, None).expect("BigUint addition does not overflow")
}

/// Uniform draw from `[0, bound)` as described in the module docs.
fn draw_below(rng: &mut SplitMix64, bound: &BigUint) -> BigUint {
    let bits = bound.bits();
    let words = bits.div_ceil(64) as usize;
    let top_bits = bits - 64 * (words as u64 - 1);
    let top_mask = if top_bits == 64 { u64::MAX } else { (1u64 << top_bits) - 1 };
    let mut buf = vec![0u32; 2 * words];
    loop {
        for w in 0..words {
            let mut x = rng.next_u64();
            if w + 1 == words {
                x &= top_mask;
            }
            buf[2 * w] = x as u32;
            buf[2 * w + 1] = (x >> 32) as u32;
        }
        let v = BigUint::from_slice(&buf);
        if &v < bound {
            return v;
        }
    }
}

/// The random HNF basis of `spec`; its determinant is exactly `p`.
pub fn generate_random_hnf(spec: &GenSpec) -> Result<IntBasis> {
    spec.validate()?;
    let n = spec.dim;
    let p = hnf_modulus(spec.bits);
    let mut rng = SplitMix64::from_seed(spec.seed.to_le_bytes());
    let mut rows = Vec::with_capacity(n);
    let mut first = vec![BigInt::zero(); n];
    first[0] = BigInt::from(p.clone());
    rows.push(first);
    for i in 1..n {
        let mut row = vec![BigInt::zero(); n];
        row[0] = BigInt::from(draw_below(&mut rng, &p));
        row[i] = BigInt::one();
        rows.push(row);
    }
    Basis::new(rows)
}

/// The critical basis `A_n(alpha)` with `alpha^2 = 3/4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CriticalBasisSpec {
    pub dim: usize,
}

impl CriticalBasisSpec {
    pub const ALPHA_SQ_NUMER: u32 = 3;
    pub const ALPHA_SQ_DENOM: u32 = 4;

    pub fn new(dim: usize) -> Self {
        CriticalBasisSpec { dim }
    }

    pub fn alpha_sq(&self) -> f64 {
        f64::from(Self::ALPHA_SQ_NUMER) / f64::from(Self::ALPHA_SQ_DENOM)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha_sq().sqrt()
    }
}

/// Lower-triangular basis with diagonal `alpha^i` and entries `alpha^j / 2`
/// below it (0-based). Every `mu_{i,j}` equals `1/2`, `||b*_i||^2 = alpha^{2i}`,
/// and the basis is reduced in every sense considered here for `delta = 1`
/// while `b_1` meets the worst-case Hermite bound.
pub fn critical_basis(spec: &CriticalBasisSpec) -> Result<RealBasis> {
    let n = spec.dim;
    if n < 2 {
        return Err(LatticeError::InvalidParams(format!("dimension must be at least 2, got {n}")));
    }
    let alpha = spec.alpha();
    let pow: Vec<f64> = (0..n as i32).map(|j| alpha.powi(j)).collect();
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match j.cmp(&i) {
                    std::cmp::Ordering::Less => pow[j] / 2.0,
                    std::cmp::Ordering::Equal => pow[j],
                    std::cmp::Ordering::Greater => 0.0,
                })
                .collect()
        })
        .collect();
    Basis::new(rows)
}
