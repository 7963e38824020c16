//! BKZ with small blocksizes.
//!
//! After LLL, tours visit the blocks `[k, min(k + beta - 1, n - 1)]`. When
//! enumeration finds a vector whose projection at `k` is shorter than
//! `sqrt(delta) ||b*_k||`, it is moved into position `k` and LLL runs on the
//! rows up to one past the block. The run ends after `n - 1` consecutive
//! block positions that changed nothing.
//!
//! The found vector is built into the basis by exact unimodular row
//! operations: pairs of rows are combined Euclid-style until one row equals
//! the vector, which is then rotated to position `k`. No dependent row is
//! ever formed, so the basis keeps its shape throughout.

use std::time::Instant;

use crate::enumeration::svp_enumerate;
use crate::error::{LatticeError, Result};
use crate::float::GsoFloat;
use crate::gso::{GsoBasis, GsoState};
use crate::insertion::{check_insertion_bound, reduce_phase, run_loop, InsertionRule, LoopSettings};
use crate::lll::int_bound;
use crate::scalar::{with_float_kind, GsoBody, Scalar};
use crate::types::{Basis, Entry, ReductionParams, ReductionStats};
use crate::verify::{first_size_violation, run_check, GsoCheck, Reducedness, Violation};

/// Enumeration results this close to `||b*_k||^2` are not inserted; they
/// cannot make progress and would loop on rounding noise at `delta = 1`.
const MIN_RELATIVE_GAIN: f64 = 1e-9;

/// Reduces `basis` to a `delta`-BKZ reduced basis with blocksize
/// `params.beta`.
///
/// The LLL phase always runs, whatever `params.preprocess` says; its
/// counters are reported as `preprocessing`.
pub fn bkz_reduce<T: Entry>(basis: &mut Basis<T>, params: &ReductionParams) -> Result<ReductionStats> {
    params.validate_beta()?;
    let start = Instant::now();
    let bound = int_bound(basis, params.delta);
    let pre = reduce_phase(basis, params, InsertionRule::Adjacent)?;
    check_insertion_bound(&pre, basis.rank(), bound)?;

    let mut stats = ReductionStats::default();
    let kind = params.float.resolve(basis);
    let settings = LoopSettings::new(params, InsertionRule::Adjacent);
    with_float_kind(basis, kind, &mut stats, &mut Tours { params, settings: &settings })?;
    stats.preprocessing = Some(Box::new(pre));
    stats.elapsed = start.elapsed();
    Ok(stats)
}

struct Tours<'a> {
    params: &'a ReductionParams,
    settings: &'a LoopSettings,
}

impl<F: GsoFloat> GsoBody<F> for Tours<'_> {
    type Output = ();

    fn run<S: Scalar>(&mut self, lat: &mut GsoBasis<S, F>, stats: &mut ReductionStats) -> Result<()> {
        let n = lat.rank();
        run_loop(lat, self.settings, 0, n, stats)?;
        if n < 2 {
            return Ok(());
        }
        let delta = F::from_f64(self.params.delta);
        let keep = F::from_f64(1.0 - MIN_RELATIVE_GAIN);
        let mut unchanged = 0;
        let mut k = 0;
        while unchanged < n - 1 {
            if k == n - 1 {
                k = 0;
                stats.sweeps += 1;
                if stats.sweeps >= self.params.max_sweeps {
                    return Err(LatticeError::SweepCapExceeded { sweeps: stats.sweeps });
                }
            }
            let h = (k + self.params.beta - 1).min(n - 1);
            let end = (h + 2).min(n);
            let before = stats.insertions;
            catch_up(lat, self.settings, h + 1, stats)?;

            let c = lat.gso().bstar_sq(k);
            let found = svp_enumerate(lat.gso(), k, h, delta * c)?.filter(|r| r.norm_sq < keep * c);
            if let Some(r) = found {
                insert_combination(lat, k, &r.coeffs)?;
                stats.insertions += 1;
            }
            catch_up(lat, self.settings, end, stats)?;
            if stats.insertions == before {
                unchanged += 1;
            } else {
                unchanged = 0;
            }
            k += 1;
        }
        catch_up(lat, self.settings, n, stats)
    }
}

/// LLL on the rows from the first stale one up to `end`.
fn catch_up<S: Scalar, F: GsoFloat>(
    lat: &mut GsoBasis<S, F>,
    settings: &LoopSettings,
    end: usize,
    stats: &mut ReductionStats,
) -> Result<()> {
    let start = lat.gso().valid_prefix().min(end);
    if start < end {
        run_loop(lat, settings, start, end, stats)?;
    }
    Ok(())
}

/// Turns rows `k..k + coeffs.len()` into a basis of the same sublattice
/// whose row at `k` is `sum_i coeffs[i] b_{k+i}` divided by the gcd of the
/// coefficients.
fn insert_combination<S: Scalar, F: GsoFloat>(lat: &mut GsoBasis<S, F>, k: usize, coeffs: &[i64]) -> Result<()> {
    let mut terms = coeffs.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (k + i, c));
    let Some((mut row, mut coeff)) = terms.next() else {
        return Ok(());
    };
    for (other, c) in terms {
        // v = cp b_p + cq b_q + ...; b_q += t b_p keeps v with cp -= t cq
        let (mut p, mut cp, mut q, mut cq) = (row, coeff, other, c);
        while cq != 0 {
            let t = cp / cq;
            if t != 0 {
                lat.sub_mul_row(q, p, &S::from_i64(-t))?;
                cp -= t * cq;
            }
            std::mem::swap(&mut p, &mut q);
            std::mem::swap(&mut cp, &mut cq);
        }
        row = p;
        coeff = cp;
    }
    debug_assert!(coeff != 0);
    lat.rotate(k, row)
}

struct BkzCheck {
    delta: f64,
    beta: usize,
    tol: f64,
}

impl GsoCheck for BkzCheck {
    fn check<F: GsoFloat>(&self, g: &GsoState<F>) -> Option<Violation> {
        if let Some(v) = first_size_violation(g) {
            return Some(v);
        }
        let n = g.rank();
        let scale = F::from_f64(self.delta * (1.0 - self.tol));
        (0..n.saturating_sub(1)).find_map(|k| {
            let h = (k + self.beta - 1).min(n - 1);
            let c = g.bstar_sq(k);
            let r = svp_enumerate(g, k, h, scale * c).ok().flatten()?;
            let ratio = (r.norm_sq / (F::from_f64(self.delta) * c)).to_f64();
            Some(Violation::Block { k, ratio })
        })
    }
}

/// Size reduction plus, for every `k`, no vector in the projected block
/// `[k, min(k + beta - 1, n - 1)]` shorter than `sqrt(delta) ||b*_k||`
/// (relative slack `1e-9`).
pub fn is_bkz_reduced<T: Entry>(basis: &Basis<T>, delta: f64, beta: usize) -> Result<Reducedness> {
    if beta < 2 {
        return Err(LatticeError::InvalidParams(format!("blocksize {beta} must be at least 2")));
    }
    run_check(basis, &BkzCheck { delta, beta, tol: 1e-9 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lll::is_lll_reduced;

    fn knapsack() -> Basis {
        let weights = [104_729, 224_737, 350_377, 479_909, 611_953, 746_773, 882_377];
        let n = weights.len();
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                let mut r = vec![0; n + 1];
                r[i] = 1;
                r[n] = weights[i];
                r
            })
            .collect();
        Basis::from_i64(&rows).unwrap()
    }

    #[test]
    fn blocksize_two_is_lll() {
        let mut b = knapsack();
        bkz_reduce(&mut b, &ReductionParams::default().with_beta(2)).unwrap();
        assert!(is_lll_reduced(&b, 0.99).unwrap().is_reduced());
        assert!(is_bkz_reduced(&b, 0.99, 2).unwrap().is_reduced());
    }

    #[test]
    fn closure_for_several_blocksizes() {
        for beta in [3, 5, 7] {
            let mut b = knapsack();
            let stats = bkz_reduce(&mut b, &ReductionParams::default().with_beta(beta)).unwrap();
            assert!(is_bkz_reduced(&b, 0.99, beta).unwrap().is_reduced(), "beta {beta}");
            assert!(is_lll_reduced(&b, 0.99).unwrap().is_reduced());
            assert!(stats.preprocessing.is_some());
        }
    }

    #[test]
    fn oracle_flags_short_block_vector() {
        let b = Basis::from_i64(&[vec![2, 0], vec![1, 3]]).unwrap();
        assert!(is_bkz_reduced(&b, 0.99, 2).unwrap().is_reduced());
        let b = Basis::from_i64(&[vec![1, 0], vec![7, 2]]).unwrap();
        assert!(matches!(is_bkz_reduced(&b, 0.99, 2).unwrap().violation(), Some(Violation::SizeReduction { .. })));
        for rows in [[vec![3, 0], vec![0, 1]], [vec![3, 0], vec![1, 1]]] {
            let b = Basis::from_i64(&rows).unwrap();
            assert!(matches!(is_bkz_reduced(&b, 0.99, 2).unwrap().violation(), Some(Violation::Block { k: 0, .. })));
        }
    }

    #[test]
    fn combination_is_inserted_exactly() {
        let mut lat: GsoBasis<i64, f64> = GsoBasis::from_rows(vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        insert_combination(&mut lat, 0, &[6, 10, 15]).unwrap();
        let rows = lat.into_rows();
        assert!(rows[0] == vec![6, 10, 15] || rows[0] == vec![-6, -10, -15]);
        let det = rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
            - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
            + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0]);
        assert_eq!(det.abs(), 1);
    }

    #[test]
    fn rejects_small_blocksize() {
        let mut b = knapsack();
        assert!(bkz_reduce(&mut b, &ReductionParams::default().with_beta(1)).is_err());
        assert!(is_bkz_reduced(&b, 0.99, 1).is_err());
    }
}
