//! DeepLLL with blocksize `beta` (Schnorr–Euchner deep insertions).

use std::time::Instant;

use crate::error::Result;
use crate::float::GsoFloat;
use crate::gso::GsoState;
use crate::insertion::{check_insertion_bound, reduce_phase, InsertionRule};
use crate::lll::int_bound;
use crate::types::{Basis, Entry, ReductionParams, ReductionStats};
use crate::verify::{first_size_violation, run_check, GsoCheck, Reducedness, Violation};

/// Reduces `basis` to a `delta`-DeepLLL reduced basis with blocksize
/// `params.beta`. `b_l` is inserted at the first position `k` (scanning up
/// from 0) where `delta ||b*_k||^2 > ||pi_k(b_l)||^2`, considering only
/// `k < beta` or `l - k <= beta`.
///
/// No polynomial bound is known for this loop; `params.max_loop_iterations`
/// caps it.
pub fn deep_lll_reduce<T: Entry>(basis: &mut Basis<T>, params: &ReductionParams) -> Result<ReductionStats> {
    params.validate_beta()?;
    let start = Instant::now();
    let pre = if params.preprocess {
        let bound = int_bound(basis, params.delta);
        let s = reduce_phase(basis, params, InsertionRule::Adjacent)?;
        check_insertion_bound(&s, basis.rank(), bound)?;
        Some(Box::new(s))
    } else {
        None
    };
    let mut stats = reduce_phase(basis, params, InsertionRule::Deep { beta: params.beta })?;
    stats.preprocessing = pre;
    stats.elapsed = start.elapsed();
    Ok(stats)
}

struct DeepCheck {
    delta: f64,
    beta: usize,
    tol: f64,
}

impl GsoCheck for DeepCheck {
    fn check<F: GsoFloat>(&self, g: &GsoState<F>) -> Option<Violation> {
        if let Some(v) = first_size_violation(g) {
            return Some(v);
        }
        let delta = F::from_f64(self.delta);
        let mut projs: Vec<F> = Vec::new();
        for l in 1..g.rank() {
            projs.clear();
            projs.resize(l + 1, F::zero());
            let mu = g.mu_row(l);
            let mut acc = g.bstar_sq(l);
            projs[l] = acc;
            for k in (0..l).rev() {
                acc += mu[k] * mu[k] * g.bstar_sq(k);
                projs[k] = acc;
            }
            for k in (0..l).filter(|&k| k < self.beta || l - k <= self.beta) {
                let ratio = (projs[k] / (delta * g.bstar_sq(k))).to_f64();
                if ratio < 1.0 - self.tol {
                    return Some(Violation::Exchange { k, l, ratio });
                }
            }
        }
        None
    }
}

/// Checks size reduction and `delta ||pi_k(b_k)||^2 <= ||pi_k(b_l)||^2` for
/// all `k < l` with `k < beta` or `l - k <= beta` (0-based), relative slack
/// `1e-9`.
pub fn is_deep_reduced<T: Entry>(basis: &Basis<T>, delta: f64, beta: usize) -> Result<Reducedness> {
    run_check(basis, &DeepCheck { delta, beta, tol: 1e-9 })
}
