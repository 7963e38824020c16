//! Shared data model: bases, reduction parameters and run statistics.

use std::fmt;
use std::time::Duration;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{LatticeError, Result};
use crate::float::{FloatKind, GsoFloat};

mod sealed {
    pub trait Sealed {}
    impl Sealed for num_bigint::BigInt {}
    impl Sealed for f64 {}
}

/// Scalar type of basis entries, implemented for `BigInt` and `f64`.
///
/// `BigInt` is the normal case. `f64` exists so that real-valued bases (the
/// critical bases) can be fed through the Gram–Schmidt engine and the
/// reducers; integer row operations on such bases are only approximate.
pub trait Entry: sealed::Sealed + Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    /// True when arithmetic on the type is exact.
    const INTEGRAL: bool;

    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn dot(a: &[Self], b: &[Self]) -> Self;
    fn to_float<F: GsoFloat>(&self) -> F;
    /// `log2 |self|`, `-inf` for zero.
    fn log2_abs(&self) -> f64;
}

impl Entry for BigInt {
    const INTEGRAL: bool = true;

    #[inline]
    fn zero() -> Self {
        Zero::zero()
    }

    #[inline]
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn dot(a: &[Self], b: &[Self]) -> Self {
        let mut acc = <BigInt as Zero>::zero();
        for (x, y) in a.iter().zip(b) {
            if !Zero::is_zero(x) && !Zero::is_zero(y) {
                acc += x * y;
            }
        }
        acc
    }

    #[inline]
    fn to_float<F: GsoFloat>(&self) -> F {
        F::from_bigint(self)
    }

    fn log2_abs(&self) -> f64 {
        if Zero::is_zero(self) {
            return f64::NEG_INFINITY;
        }
        let bits = self.bits();
        if bits <= 1000 {
            self.abs().to_f64().unwrap_or(f64::INFINITY).log2()
        } else {
            let shift = bits - 64;
            (self.abs() >> shift).to_f64().unwrap_or(0.0).log2() + shift as f64
        }
    }
}

impl Entry for f64 {
    const INTEGRAL: bool = false;

    #[inline]
    fn zero() -> Self {
        0.0
    }

    #[inline]
    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn dot(a: &[Self], b: &[Self]) -> Self {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    #[inline]
    fn to_float<F: GsoFloat>(&self) -> F {
        F::from_f64(*self)
    }

    fn log2_abs(&self) -> f64 {
        self.abs().log2()
    }
}

/// A lattice basis stored row-wise: `n` vectors of length `m`, `1 <= n <= m`.
#[derive(Clone, PartialEq, Debug)]
pub struct Basis<T = BigInt> {
    rows: Vec<Vec<T>>,
    ncols: usize,
}

pub type IntBasis = Basis<BigInt>;
pub type RealBasis = Basis<f64>;

impl<T: Entry> Basis<T> {
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(LatticeError::InvalidShape("basis has no rows".into()));
        }
        let m = rows[0].len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != m) {
            return Err(LatticeError::InvalidShape(format!("row {i} has length {}, expected {m}", r.len())));
        }
        if n > m {
            return Err(LatticeError::InvalidShape(format!("rank {n} exceeds ambient dimension {m}")));
        }
        Ok(Basis { rows, ncols: m })
    }

    /// Number of basis vectors `n`.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Length `m` of each basis vector.
    pub fn ambient_dim(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Vec<T>> {
        self.rows
    }

    /// Puts back rows taken with [`Basis::take_rows`]; the caller keeps the shape.
    pub(crate) fn replace_rows(&mut self, rows: Vec<Vec<T>>) {
        debug_assert!(rows.iter().all(|r| r.len() == self.ncols));
        self.rows = rows;
    }

    pub(crate) fn take_rows(&mut self) -> Vec<Vec<T>> {
        std::mem::take(&mut self.rows)
    }

    /// Squared Euclidean norm of row `i`.
    pub fn norm_sq(&self, i: usize) -> T {
        T::dot(&self.rows[i], &self.rows[i])
    }

    /// Applies `sigma_{k,l}`: row `l` moves to position `k`, rows `k..l`
    /// shift down by one (0-based indices).
    pub fn deep_insert(&mut self, k: usize, l: usize) {
        let row = self.rows.remove(l);
        self.rows.insert(k, row);
    }

    /// `log2` of the largest squared row norm; drives float-kind selection.
    pub fn max_norm_sq_log2(&self) -> f64 {
        let m = self.ncols as f64;
        self.rows.iter().flat_map(|r| r.iter()).map(Entry::log2_abs).fold(f64::NEG_INFINITY, f64::max) * 2.0 + m.log2()
    }
}

impl Basis<BigInt> {
    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self> {
        Basis::new(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { <BigInt as Zero>::zero() }).collect())
            .collect();
        Basis { rows, ncols: n }
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let n = entries.len();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { BigInt::from(entries[i]) } else { <BigInt as Zero>::zero() }).collect())
            .collect();
        Basis { rows, ncols: n }
    }

    /// Converts to a real-valued basis (lossy for entries beyond `2^53`).
    pub fn to_real(&self) -> RealBasis {
        Basis {
            rows: self.rows.iter().map(|r| r.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()).collect(),
            ncols: self.ncols,
        }
    }
}

/// Which insertion place the potential-driven reducer picks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum InsertionStrategy {
    /// The insertion that minimizes the resulting potential (PotLLL).
    #[default]
    MinPotential,
    /// The smallest index whose insertion shrinks the potential below
    /// `delta` times its current value (PotLLL2).
    FirstBelowDelta,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloatConfig {
    pub kind: FloatKind,
    /// Relative slack allowed by consistency checks and reducedness oracles.
    pub relative_tolerance: f64,
}

impl Default for FloatConfig {
    fn default() -> Self {
        FloatConfig { kind: FloatKind::from_env().unwrap_or_default(), relative_tolerance: 1e-9 }
    }
}

impl FloatConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.relative_tolerance > 0.0 && self.relative_tolerance <= 1e-3) {
            return Err(LatticeError::InvalidParams(format!(
                "relative tolerance {} outside (0, 1e-3]",
                self.relative_tolerance
            )));
        }
        Ok(())
    }

    /// Resolves `Auto` against the magnitude of a concrete basis.
    pub fn resolve<T: Entry>(&self, basis: &Basis<T>) -> FloatKind {
        match self.kind {
            FloatKind::Auto => {
                if basis.max_norm_sq_log2() <= crate::float::MAX_DOUBLE_LOG2 {
                    FloatKind::HardwareDouble
                } else {
                    FloatKind::ExtendedOrEmulated
                }
            }
            k => k,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionParams {
    /// Reduction parameter in `(1/4, 1]`.
    pub delta: f64,
    /// Blocksize for DeepLLL and BKZ.
    pub beta: usize,
    /// Run plain LLL with the same `delta` before the main loop.
    pub preprocess: bool,
    pub insertion_strategy: InsertionStrategy,
    pub float: FloatConfig,
    /// Hard cap on passes of the main loop.
    pub max_loop_iterations: u64,
    /// Hard cap on BKZ sweeps.
    pub max_sweeps: u64,
}

impl Default for ReductionParams {
    fn default() -> Self {
        ReductionParams {
            delta: 0.99,
            beta: 2,
            preprocess: true,
            insertion_strategy: InsertionStrategy::MinPotential,
            float: FloatConfig::default(),
            max_loop_iterations: 10_000_000,
            max_sweeps: 5000,
        }
    }
}

impl ReductionParams {
    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_beta(mut self, beta: usize) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_preprocess(mut self, preprocess: bool) -> Self {
        self.preprocess = preprocess;
        self
    }

    pub fn with_strategy(mut self, strategy: InsertionStrategy) -> Self {
        self.insertion_strategy = strategy;
        self
    }

    pub fn with_float(mut self, kind: FloatKind) -> Self {
        self.float.kind = kind;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.25 && self.delta <= 1.0) {
            return Err(LatticeError::InvalidParams(format!("delta = {} is outside (1/4, 1]", self.delta)));
        }
        self.float.validate()
    }

    pub(crate) fn validate_beta(&self) -> Result<()> {
        self.validate()?;
        if self.beta < 2 {
            return Err(LatticeError::InvalidParams(format!("blocksize {} must be at least 2", self.beta)));
        }
        Ok(())
    }
}

fn serialize_secs<S: Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

/// Counters collected by one reduction run.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ReductionStats {
    /// Passes of the outer loop.
    pub loop_iterations: u64,
    /// Applied deep insertions `sigma_{k,l}` with `k < l` (swaps included).
    pub insertions: u64,
    /// Integer row combinations performed by size reduction.
    pub size_reduction_ops: u64,
    /// Rows whose size reduction stopped making progress in floating point.
    pub precision_warnings: u64,
    /// BKZ only: completed tours over all block positions.
    pub sweeps: u64,
    /// Potential-based iteration bound evaluated at loop entry, when checked.
    pub insertion_bound: Option<f64>,
    #[serde(serialize_with = "serialize_secs")]
    pub elapsed: Duration,
    /// Counters of the LLL preprocessing phase, when it ran.
    pub preprocessing: Option<Box<ReductionStats>>,
}

impl ReductionStats {
    /// Wall-clock time including preprocessing.
    pub fn total_elapsed(&self) -> Duration {
        self.elapsed
    }
}
