//! The deep-insertion loop shared by LLL, DeepLLL and PotLLL.
//!
//! All three algorithms walk an index `l` over the basis, size-reduce `b_l`,
//! and either move `b_l` to an earlier position `k` (`sigma_{k,l}`, after
//! which `l <- k`) or advance. They only differ in how `k` is chosen.

use std::time::Instant;

use crate::error::{LatticeError, Result};
use crate::float::GsoFloat;
use crate::gso::{GsoBasis, GsoState};
use crate::scalar::{with_float_kind, GsoBody, Scalar};
use crate::types::{Basis, Entry, InsertionStrategy, ReductionParams, ReductionStats};

/// How the insertion place for `b_l` is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InsertionRule {
    /// Lovász condition on `(l-1, l)` only: classical LLL.
    Adjacent,
    /// First `k` (scanning upward) with `delta ||b*_k||^2 > ||pi_k(b_l)||^2`,
    /// restricted to `k < beta` or `l - k <= beta`.
    Deep { beta: usize },
    /// Potential-ratio driven insertion.
    Potential(InsertionStrategy),
}

/// Running state of the `P_{j,l}` recurrence, log domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialRatioRow {
    /// `ln P_{j,l}` for the last visited `j`.
    pub log_p: f64,
    /// Selected insertion index (0-based).
    pub argmin_k: usize,
    /// `ln P_{argmin_k, l}`; never positive.
    pub log_p_min: f64,
}

impl PotentialRatioRow {
    pub fn p_min(&self) -> f64 {
        self.log_p_min.exp()
    }
}

/// `(j, ln P_{j,l})` for `j = l-1` down to `0`, from the recurrence
/// `P_{j,l} = P_{j+1,l} * ||pi_j(b_l)||^2 / ||b*_j||^2` with `P_{l,l} = 1`,
/// where `||pi_j(b_l)||^2` accumulates `mu_{l,j}^2 ||b*_j||^2` on top of
/// `||b*_l||^2`.
fn log_ratio_steps<F: GsoFloat>(gso: &GsoState<F>, l: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
    let mu = gso.mu_row(l);
    let mut proj = gso.bstar_sq(l);
    let mut log_p = 0.0;
    (0..l).rev().map(move |j| {
        let c = gso.bstar_sq(j);
        proj += mu[j] * mu[j] * c;
        log_p += proj.ln() - c.ln();
        (j, log_p)
    })
}

/// `ln (Pot(sigma_{k,l} B) / Pot(B))` by the recurrence (0-based, `k <= l`).
pub fn log_potential_ratio<F: GsoFloat>(gso: &GsoState<F>, k: usize, l: usize) -> f64 {
    log_ratio_steps(gso, l).take_while(|&(j, _)| j >= k).last().map_or(0.0, |(_, p)| p)
}

/// Scans `j = l-1` down to `0` along the recurrence of
/// [`log_potential_ratio`].
///
/// `MinPotential` keeps the first strict minimum met while descending, so ties
/// stay at the larger index. `FirstBelowDelta` returns the smallest `j` with
/// `P_{j,l} < delta`. When nothing qualifies the result is `(l, P = 1)`.
pub fn potential_ratio_scan<F: GsoFloat>(
    gso: &GsoState<F>,
    l: usize,
    strategy: InsertionStrategy,
    delta: f64,
) -> PotentialRatioRow {
    let log_delta = delta.ln();
    let mut row = PotentialRatioRow { log_p: 0.0, argmin_k: l, log_p_min: 0.0 };
    for (j, log_p) in log_ratio_steps(gso, l) {
        row.log_p = log_p;
        let take = match strategy {
            InsertionStrategy::MinPotential => log_p < row.log_p_min,
            InsertionStrategy::FirstBelowDelta => log_p < log_delta,
        };
        if take {
            row.argmin_k = j;
            row.log_p_min = log_p;
        }
    }
    row
}

pub(crate) struct LoopSettings {
    pub delta: f64,
    pub rule: InsertionRule,
    pub max_loop_iterations: u64,
}

impl LoopSettings {
    pub fn new(params: &ReductionParams, rule: InsertionRule) -> Self {
        LoopSettings { delta: params.delta, rule, max_loop_iterations: params.max_loop_iterations }
    }
}

struct Chooser {
    rule: InsertionRule,
    delta: f64,
    log_delta: f64,
    proj: Vec<f64>,
}

impl Chooser {
    fn choose<F: GsoFloat>(&mut self, gso: &GsoState<F>, l: usize) -> Option<usize> {
        if l == 0 {
            return None;
        }
        let delta = F::from_f64(self.delta);
        match self.rule {
            InsertionRule::Adjacent => {
                let c = gso.bstar_sq(l - 1);
                let m = gso.mu(l, l - 1);
                let proj = gso.bstar_sq(l) + m * m * c;
                (delta * c > proj).then_some(l - 1)
            }
            InsertionRule::Deep { beta } => {
                // ||pi_k(b_l)||^2 for k = 0..=l, accumulated from the bottom.
                let mu = gso.mu_row(l);
                let mut acc = gso.bstar_sq(l);
                let mut projs: Vec<F> = vec![acc; l + 1];
                for k in (0..l).rev() {
                    acc += mu[k] * mu[k] * gso.bstar_sq(k);
                    projs[k] = acc;
                }
                (0..l).filter(|&k| k < beta || l - k <= beta).find(|&k| delta * gso.bstar_sq(k) > projs[k])
            }
            InsertionRule::Potential(strategy) => {
                let scan = potential_ratio_scan(gso, l, strategy, self.delta);
                (scan.argmin_k < l && scan.log_p_min < self.log_delta).then_some(scan.argmin_k)
            }
        }
    }
}

/// Consistency of the two routes to `||pi_j(b_l)||^2`: the Gram-based
/// by-product of the row update and the `mu^2 ||b*||^2` accumulation.
fn debug_check_projections<S: Scalar, F: GsoFloat>(lat: &GsoBasis<S, F>, l: usize, scratch: &mut Vec<f64>) {
    let Some((row, by_product)) = lat.projected_norms() else { return };
    if row != l {
        return;
    }
    let gso = lat.gso();
    let scale = by_product[0].to_f64().abs();
    if !scale.is_finite() {
        return;
    }
    scratch.clear();
    for j in 0..=l {
        scratch.push(gso.projected_norm_sq(l, j).to_f64());
    }
    for (j, (a, b)) in by_product.iter().zip(scratch.iter()).enumerate() {
        let a = a.to_f64();
        debug_assert!(
            (a - b).abs() <= 1e-9 * scale.max(1.0) || j == l,
            "row {l}: projection {j} disagrees ({a} vs {b})"
        );
    }
}

/// Runs the insertion loop over rows `start..end`. Rows `< start` must be
/// current in the GSO and already reduced among themselves.
pub(crate) fn run_loop<S: Scalar, F: GsoFloat>(
    lat: &mut GsoBasis<S, F>,
    settings: &LoopSettings,
    start: usize,
    end: usize,
    stats: &mut ReductionStats,
) -> Result<()> {
    let mut chooser =
        Chooser { rule: settings.rule, delta: settings.delta, log_delta: settings.delta.ln(), proj: Vec::new() };
    let mut l = start;
    while l < end {
        stats.loop_iterations += 1;
        if stats.loop_iterations > settings.max_loop_iterations {
            return Err(LatticeError::IterationCapExceeded { cap: settings.max_loop_iterations });
        }
        lat.size_reduce_row(l, stats)?;
        if cfg!(debug_assertions) {
            debug_check_projections(lat, l, &mut chooser.proj);
        }
        match chooser.choose(lat.gso(), l) {
            Some(k) => {
                lat.deep_insert(k, l)?;
                stats.insertions += 1;
                l = k;
            }
            None => l += 1,
        }
    }
    Ok(())
}

/// A single full insertion-loop phase over the whole basis.
pub(crate) struct FullLoop<'a> {
    pub settings: &'a LoopSettings,
}

impl<F: GsoFloat> GsoBody<F> for FullLoop<'_> {
    type Output = ();

    fn run<S: Scalar>(&mut self, lat: &mut GsoBasis<S, F>, stats: &mut ReductionStats) -> Result<()> {
        let n = lat.rank();
        run_loop(lat, self.settings, 0, n, stats)
    }
}

/// Runs one timed insertion-loop phase over `basis`.
pub(crate) fn reduce_phase<T: Entry>(
    basis: &mut Basis<T>,
    params: &ReductionParams,
    rule: InsertionRule,
) -> Result<ReductionStats> {
    let start = Instant::now();
    let mut stats = ReductionStats::default();
    let settings = LoopSettings::new(params, rule);
    let kind = params.float.resolve(basis);
    with_float_kind(basis, kind, &mut stats, &mut FullLoop { settings: &settings })?;
    stats.elapsed = start.elapsed();
    Ok(stats)
}

/// `log_{1/delta}(C^{n(n-1)/2})` with `C = max_i ||b_i||^2`: the number of
/// insertions after which the potential of an integer basis would drop below
/// its minimum, when every insertion shrinks it by at least `delta`.
/// `None` for `delta = 1`, where no such bound exists.
pub fn insertion_bound<T: Entry>(basis: &Basis<T>, delta: f64) -> Option<f64> {
    if delta >= 1.0 {
        return None;
    }
    let n = basis.rank() as f64;
    let log2_c = (0..basis.rank()).map(|i| basis.norm_sq(i).log2_abs()).fold(0.0, f64::max);
    let ln_c = log2_c * std::f64::consts::LN_2;
    Some(n * (n - 1.0) / 2.0 * ln_c / (1.0 / delta).ln())
}

/// Checks a finished run against the insertion bound, and the loop-pass count
/// against `(n-1) N + n` advancing passes for `N` insertions.
pub(crate) fn check_insertion_bound(stats: &ReductionStats, n: usize, bound: Option<f64>) -> Result<()> {
    let Some(bound) = bound else { return Ok(()) };
    let insertions = stats.insertions;
    // A hair of slack for the float evaluation of the bound itself.
    if insertions as f64 > bound * (1.0 + 1e-12) + 1e-9 {
        return Err(LatticeError::InsertionBoundExceeded { insertions, bound });
    }
    let advancing = stats.loop_iterations - insertions;
    let limit = (n as u64 - 1) * insertions + n as u64;
    if advancing > limit {
        return Err(LatticeError::InsertionBoundExceeded { insertions, bound });
    }
    Ok(())
}
