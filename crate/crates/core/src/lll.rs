//! Classical `delta`-LLL, run as the adjacent-swap case of the insertion loop.

use crate::error::Result;
use crate::float::GsoFloat;
use crate::gso::GsoState;
use crate::insertion::{check_insertion_bound, insertion_bound, reduce_phase, InsertionRule};
use crate::types::{Basis, Entry, ReductionParams, ReductionStats};
use crate::verify::{first_size_violation, run_check, GsoCheck, Reducedness, Violation};

/// Reduces `basis` in place to a `delta`-LLL reduced basis of the same lattice.
pub fn lll_reduce<T: Entry>(basis: &mut Basis<T>, params: &ReductionParams) -> Result<ReductionStats> {
    params.validate()?;
    let bound = int_bound(basis, params.delta);
    let mut stats = reduce_phase(basis, params, InsertionRule::Adjacent)?;
    stats.insertion_bound = bound;
    check_insertion_bound(&stats, basis.rank(), bound)?;
    Ok(stats)
}

/// The insertion bound only applies to integer lattices.
pub(crate) fn int_bound<T: Entry>(basis: &Basis<T>, delta: f64) -> Option<f64> {
    if T::INTEGRAL {
        insertion_bound(basis, delta)
    } else {
        None
    }
}

struct LllCheck {
    delta: f64,
    tol: f64,
}

impl GsoCheck for LllCheck {
    fn check<F: GsoFloat>(&self, g: &GsoState<F>) -> Option<Violation> {
        if let Some(v) = first_size_violation(g) {
            return Some(v);
        }
        let delta = F::from_f64(self.delta);
        (1..g.rank()).find_map(|l| {
            let k = l - 1;
            let rhs = g.projected_norm_sq(l, k);
            let lhs = delta * g.bstar_sq(k);
            let ratio = (rhs / lhs).to_f64();
            (ratio < 1.0 - self.tol).then_some(Violation::Exchange { k, l, ratio })
        })
    }
}

/// Size reduction plus the Lovász condition
/// `delta ||pi_k(b_k)||^2 <= ||pi_k(b_{k+1})||^2`, with relative slack `1e-9`.
pub fn is_lll_reduced<T: Entry>(basis: &Basis<T>, delta: f64) -> Result<Reducedness> {
    run_check(basis, &LllCheck { delta, tol: 1e-9 })
}
