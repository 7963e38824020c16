//! PotLLL and PotLLL2: deep insertions driven by the basis potential.
//!
//! For each `l` the loop evaluates `P_{j,l} = Pot(sigma_{j,l} B) / Pot(B)` for
//! every `j < l` in one descending pass and inserts `b_l` at the chosen `k`
//! whenever `P_{k,l} < delta`. Every insertion therefore shrinks the potential
//! by at least `delta`, which bounds the number of insertions on integer
//! lattices by `log_{1/delta}(C^{n(n-1)/2})`, `C = max ||b_i||^2`. The bound is
//! checked after every run.

use std::time::Instant;

use num_rational::BigRational;
use num_traits::Signed;

use crate::error::Result;
use crate::exact::{rational_from_f64, ExactGso};
use crate::float::GsoFloat;
use crate::gso::GsoState;
use crate::insertion::{check_insertion_bound, reduce_phase, InsertionRule};
use crate::lll::int_bound;
use crate::types::{Basis, Entry, IntBasis, ReductionParams, ReductionStats};
use crate::verify::{first_size_violation, run_check, GsoCheck, Reducedness, Violation};

/// Reduces `basis` to a `delta`-PotLLL reduced basis.
///
/// With `params.preprocess` the basis is first `delta`-LLL reduced. The
/// insertion place is chosen by `params.insertion_strategy`.
pub fn pot_lll_reduce<T: Entry>(basis: &mut Basis<T>, params: &ReductionParams) -> Result<ReductionStats> {
    params.validate()?;
    let start = Instant::now();
    let pre = if params.preprocess {
        let pre_bound = int_bound(basis, params.delta);
        let s = reduce_phase(basis, params, InsertionRule::Adjacent)?;
        check_insertion_bound(&s, basis.rank(), pre_bound)?;
        Some(Box::new(s))
    } else {
        None
    };
    let bound = int_bound(basis, params.delta);
    let mut stats = reduce_phase(basis, params, InsertionRule::Potential(params.insertion_strategy))?;
    stats.insertion_bound = bound;
    check_insertion_bound(&stats, basis.rank(), bound)?;
    stats.preprocessing = pre;
    stats.elapsed = start.elapsed();
    Ok(stats)
}

struct PotCheck {
    delta: f64,
    tol: f64,
}

impl GsoCheck for PotCheck {
    fn check<F: GsoFloat>(&self, g: &GsoState<F>) -> Option<Violation> {
        if let Some(v) = first_size_violation(g) {
            return Some(v);
        }
        let log_delta = self.delta.ln();
        for l in 1..g.rank() {
            let mu = g.mu_row(l);
            let mut proj = g.bstar_sq(l);
            let mut log_p = 0.0;
            for k in (0..l).rev() {
                let c = g.bstar_sq(k);
                proj += mu[k] * mu[k] * c;
                log_p += proj.ln() - c.ln();
                if log_p < log_delta - self.tol {
                    return Some(Violation::Exchange { k, l, ratio: (log_p - log_delta).exp() });
                }
            }
        }
        None
    }
}

/// Size reduction plus `delta Pot(B) <= Pot(sigma_{k,l} B)` for all `k < l`,
/// evaluated through the `P_{k,l}` recurrence with slack `1e-9` in the log
/// domain.
pub fn is_pot_reduced<T: Entry>(basis: &Basis<T>, delta: f64) -> Result<Reducedness> {
    run_check(basis, &PotCheck { delta, tol: 1e-9 })
}

/// Exact-rational form of [`is_pot_reduced`] for small integer bases (no
/// slack; `delta` is taken as the exact value of the double).
pub fn is_pot_reduced_exact(basis: &IntBasis, delta: f64) -> Result<Reducedness> {
    let g = ExactGso::new(basis)?;
    let half = BigRational::new(1.into(), 2.into());
    for i in 0..g.rank() {
        for j in 0..i {
            if g.mu[i][j].abs() > half {
                let mu = crate::exact::ln_rational(&g.mu[i][j].abs()).exp();
                return Ok(Reducedness::Violated(Violation::SizeReduction { i, j, mu }));
            }
        }
    }
    let delta = rational_from_f64(delta);
    for l in 1..g.rank() {
        for k in (0..l).rev() {
            let p = g.potential_ratio(k, l);
            if p < delta {
                let ratio = (crate::exact::ln_rational(&p) - crate::exact::ln_rational(&delta)).exp();
                return Ok(Reducedness::Violated(Violation::Exchange { k, l, ratio }));
            }
        }
    }
    Ok(Reducedness::Reduced)
}
