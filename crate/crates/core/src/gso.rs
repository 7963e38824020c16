//! Floating-point Gram–Schmidt orthogonalization driven by an exact Gram
//! matrix.
//!
//! [`GsoBasis`] owns the basis rows together with the exact Gram matrix
//! `G = B B^T` (kept current under row operations and row permutations) and a
//! [`GsoState`] holding `mu_{i,j}` and `||b*_i||^2` in a chosen float type.
//! A row's Gram–Schmidt data is always recomputed from the exact Gram entries,
//! so rounding errors never accumulate across row operations.

use std::any::Any;

use log::warn;
use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{LatticeError, Result};
use crate::exact::integral_gso;
use crate::float::GsoFloat;
use crate::scalar::{with_scalar, GsoBody, Scalar};
use crate::types::{Basis, Entry, IntBasis, ReductionStats};

/// Slack on `|mu| <= 1/2` accepted by size reduction and by the oracles.
pub const SIZE_REDUCTION_SLACK: f64 = 1e-9;

/// Size reduction gives up on a row after this many consecutive passes that
/// fail to shrink `max |mu|`.
pub const MAX_STALLED_PASSES: u32 = 8;

/// Gram–Schmidt coefficients and squared norms for a prefix of a basis.
#[derive(Clone, Debug)]
pub struct GsoState<F = f64> {
    mu: Vec<Vec<F>>,
    r: Vec<Vec<F>>,
    bstar_sq: Vec<F>,
    valid_prefix: usize,
}

impl<F: GsoFloat> GsoState<F> {
    fn new(n: usize) -> Self {
        GsoState {
            mu: (0..n).map(|i| vec![F::zero(); i]).collect(),
            r: (0..n).map(|i| vec![F::zero(); i]).collect(),
            bstar_sq: vec![F::zero(); n],
            valid_prefix: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.bstar_sq.len()
    }

    /// Number of leading rows whose data is current.
    pub fn valid_prefix(&self) -> usize {
        self.valid_prefix
    }

    pub fn is_fully_valid(&self) -> bool {
        self.valid_prefix == self.rank()
    }

    /// `mu_{i,j}` for `j < i`; the diagonal reads as 1.
    #[inline]
    pub fn mu(&self, i: usize, j: usize) -> F {
        if i == j {
            F::one()
        } else {
            debug_assert!(j < i);
            self.mu[i][j]
        }
    }

    pub fn mu_row(&self, i: usize) -> &[F] {
        &self.mu[i]
    }

    /// `||b*_i||^2`.
    #[inline]
    pub fn bstar_sq(&self, i: usize) -> F {
        self.bstar_sq[i]
    }

    pub fn bstar_sq_all(&self) -> &[F] {
        &self.bstar_sq
    }

    /// `||pi_k(b_i)||^2 = ||b*_i||^2 + sum_{k <= j < i} mu_{i,j}^2 ||b*_j||^2`.
    pub fn projected_norm_sq(&self, i: usize, k: usize) -> F {
        let mut acc = self.bstar_sq[i];
        for j in (k..i).rev() {
            let m = self.mu[i][j];
            acc += m * m * self.bstar_sq[j];
        }
        acc
    }

    pub(crate) fn invalidate_from(&mut self, i: usize) {
        self.valid_prefix = self.valid_prefix.min(i);
    }

    pub(crate) fn require(&self, needed: usize) -> Result<()> {
        if self.valid_prefix < needed {
            Err(LatticeError::InvalidGsoPrefix { needed, valid: self.valid_prefix })
        } else {
            Ok(())
        }
    }
}

/// A basis together with its exact Gram matrix and floating-point GSO.
///
/// Gram rows are materialized on first use: rows the reduction has not
/// reached yet are never touched by row operations, which matters when their
/// entries are thousands of bits long.
#[derive(Clone, Debug)]
pub(crate) struct GsoBasis<S: Scalar, F: GsoFloat> {
    rows: Vec<Vec<S>>,
    /// Lower triangle, `gram[i][j] = <b_i, b_j>` for `j <= i < gram_rows`.
    gram: Vec<Vec<S>>,
    gram_rows: usize,
    gso: GsoState<F>,
    /// `||pi_j(b_i)||^2` for `j = 0..=i` from the last `update_row(i)`.
    proj: Vec<F>,
    proj_row: Option<usize>,
}

impl<S: Scalar, F: GsoFloat> GsoBasis<S, F> {
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let n = rows.len();
        GsoBasis {
            rows,
            gram: vec![Vec::new(); n],
            gram_rows: 0,
            gso: GsoState::new(n),
            proj: Vec::with_capacity(n + 1),
            proj_row: None,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn gso(&self) -> &GsoState<F> {
        &self.gso
    }

    #[cfg(test)]
    pub fn rows(&self) -> &[Vec<S>] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Vec<S>> {
        self.rows
    }

    /// Materializes the Gram rows up to and including `i`.
    pub fn ensure_gram(&mut self, i: usize) -> Result<()> {
        while self.gram_rows <= i {
            let t = self.gram_rows;
            self.gram[t] = (0..=t).map(|j| S::dot(&self.rows[t], &self.rows[j])).collect::<Result<_>>()?;
            self.gram_rows += 1;
        }
        Ok(())
    }

    /// Exact `<b_i, b_j>`; both rows must be materialized.
    #[inline]
    pub fn gram(&self, i: usize, j: usize) -> &S {
        debug_assert!(i.max(j) < self.gram_rows);
        if j <= i {
            &self.gram[i][j]
        } else {
            &self.gram[j][i]
        }
    }

    /// Computes every Gram entry.
    #[cfg(test)]
    pub fn materialize_gram(&mut self) -> Result<()> {
        match self.rank() {
            0 => Ok(()),
            n => self.ensure_gram(n - 1),
        }
    }

    #[inline]
    fn gram_mut(&mut self, i: usize, j: usize) -> &mut S {
        if j <= i {
            &mut self.gram[i][j]
        } else {
            &mut self.gram[j][i]
        }
    }

    /// Recomputes every row from scratch.
    pub fn compute_all(&mut self) -> Result<()> {
        self.gso.valid_prefix = 0;
        for i in 0..self.rank() {
            self.update_row(i)?;
            let c = self.gso.bstar_sq[i];
            if !(c > F::zero()) || !c.is_finite() {
                return Err(LatticeError::DependentRows { row: i });
            }
        }
        Ok(())
    }

    /// Recomputes `mu_{i,j}` (`j < i`) and `||b*_i||^2` from the Gram row of
    /// `b_i`. Rows `< i` must be current; afterwards exactly `i + 1` rows are.
    ///
    /// The intermediate values `||pi_j(b_i)||^2`, `j = 0..=i`, are left in
    /// [`GsoBasis::projected_norms`].
    pub fn update_row(&mut self, i: usize) -> Result<()> {
        self.gso.require(i)?;
        self.ensure_gram(i)?;
        let gram_row = &self.gram[i];
        let mut s: F = gram_row[i].to_float();
        self.proj.clear();
        self.proj.push(s);

        let (done_mu, rest_mu) = self.gso.mu.split_at_mut(i);
        let (_, rest_r) = self.gso.r.split_at_mut(i);
        let mu_i = &mut rest_mu[0];
        let r_i = &mut rest_r[0];
        for j in 0..i {
            let mu_j = &done_mu[j];
            let mut rij: F = gram_row[j].to_float();
            for k in 0..j {
                rij.sub_mul(mu_j[k], r_i[k]);
            }
            r_i[j] = rij;
            let mij = rij / self.gso.bstar_sq[j];
            mu_i[j] = mij;
            s.sub_mul(mij, rij);
            self.proj.push(s);
        }
        self.gso.bstar_sq[i] = s;
        self.gso.valid_prefix = i + 1;
        self.proj_row = Some(i);
        Ok(())
    }

    /// By-product of the last [`GsoBasis::update_row`] call, `(row, values)`.
    pub fn projected_norms(&self) -> Option<(usize, &[F])> {
        self.proj_row.map(|i| (i, self.proj.as_slice()))
    }

    /// `b_target <- b_target - x * b_source`, keeping the Gram matrix exact.
    /// Invalidates the GSO from `target` on.
    pub fn sub_mul_row(&mut self, target: usize, source: usize, x: &S) -> Result<()> {
        debug_assert_ne!(target, source);
        self.ensure_gram(target.max(source))?;
        self.gso.invalidate_from(target);
        self.proj_row = None;
        let (src_row, dst_row) = if source < target {
            let (a, b) = self.rows.split_at_mut(target);
            (&a[source], &mut b[0])
        } else {
            let (a, b) = self.rows.split_at_mut(source);
            (&b[0], &mut a[target])
        };
        for (d, s) in dst_row.iter_mut().zip(src_row.iter()) {
            d.sub_mul(x, s)?;
        }

        let old_ts = self.gram(target, source).clone();
        for i in 0..self.gram_rows {
            if i == target {
                continue;
            }
            let mut entry = std::mem::replace(self.gram_mut(target, i), S::zero());
            let r = entry.sub_mul(x, self.gram(source, i));
            *self.gram_mut(target, i) = entry;
            r?;
        }
        // G_tt - 2x G_ts + x^2 G_ss = G_tt - x (G_ts(old) + G_ts(new))
        let mut sum = old_ts;
        sum.add_assign(self.gram(target, source))?;
        self.gram[target][target].sub_mul(x, &sum)
    }

    /// Applies `sigma_{k,l}` (0-based): `b_l` moves to position `k`.
    /// Invalidates the GSO from `k` on; nothing is recomputed.
    pub fn rotate(&mut self, k: usize, l: usize) -> Result<()> {
        if k == l {
            return Ok(());
        }
        self.ensure_gram(l)?;
        let n = self.gram_rows;
        let row = self.rows.remove(l);
        self.rows.insert(k, row);

        // new index t holds old index perm(t)
        let perm = |t: usize| -> usize {
            if t < k || t > l {
                t
            } else if t == k {
                l
            } else {
                t - 1
            }
        };
        // rows k..=l are rebuilt, rows below only see columns k..=l rotate
        let mut rebuilt: Vec<Vec<S>> = Vec::with_capacity(l - k + 1);
        for t in k..=l {
            let pt = perm(t);
            let mut new_row = Vec::with_capacity(t + 1);
            for s in 0..=t {
                let ps = perm(s);
                let (a, b) = if ps <= pt { (pt, ps) } else { (ps, pt) };
                new_row.push(std::mem::replace(&mut self.gram[a][b], S::zero()));
            }
            rebuilt.push(new_row);
        }
        for (t, row) in (k..=l).zip(rebuilt) {
            self.gram[t] = row;
        }
        for t in l + 1..n {
            self.gram[t][k..=l].rotate_right(1);
        }

        self.gso.invalidate_from(k);
        self.proj_row = None;
        Ok(())
    }

    /// Applies `sigma_{k,l}` and recomputes row `k`.
    pub fn deep_insert(&mut self, k: usize, l: usize) -> Result<()> {
        let n = self.rank();
        if k > l || l >= n {
            return Err(LatticeError::IndexOutOfBounds { k, l, n });
        }
        self.gso.require(k)?;
        self.rotate(k, l)?;
        self.update_row(k)
    }

    /// Size-reduces `b_l` against `b_0, …, b_{l-1}`.
    ///
    /// Passes run from `j = l-1` down to `0`, subtracting `round(mu_{l,j}) b_j`
    /// and updating the remaining coefficients of the row in floating point.
    /// The row is then recomputed from the exact Gram matrix and the process
    /// repeats until every `|mu_{l,j}| <= 1/2 + SIZE_REDUCTION_SLACK`. If
    /// [`MAX_STALLED_PASSES`] consecutive passes fail to shrink `max |mu|`, the
    /// row is left as is and a precision warning is recorded.
    ///
    /// On return row `l` is current. A row that reduces to the zero vector is
    /// reported as [`LatticeError::DependentRows`].
    pub fn size_reduce_row(&mut self, l: usize, stats: &mut ReductionStats) -> Result<()> {
        let eta = 0.5 + SIZE_REDUCTION_SLACK;
        let mut last_max = f64::INFINITY;
        let mut stalled = 0u32;
        let mut coeffs: Vec<F> = Vec::with_capacity(l);
        loop {
            if self.gso.valid_prefix <= l {
                self.update_row(l)?;
            }
            let max_mu = self.gso.mu[l].iter().map(|m| m.abs().to_f64()).fold(0.0, f64::max);
            if max_mu <= eta {
                break;
            }
            if !(max_mu < last_max) {
                stalled += 1;
                if stalled >= MAX_STALLED_PASSES {
                    warn!("size reduction of row {l} stalled at max |mu| = {max_mu:e}");
                    stats.precision_warnings += 1;
                    break;
                }
            } else {
                stalled = 0;
                last_max = max_mu;
            }

            coeffs.clear();
            coeffs.extend_from_slice(&self.gso.mu[l]);
            for j in (0..l).rev() {
                let c = coeffs[j];
                if c.abs().to_f64() <= eta {
                    continue;
                }
                let x = S::round_from(c)?;
                let xf: F = x.to_float();
                for (k, mu_jk) in self.gso.mu[j].iter().enumerate() {
                    coeffs[k].sub_mul(xf, *mu_jk);
                }
                coeffs[j] -= xf;
                self.sub_mul_row(l, j, &x)?;
                stats.size_reduction_ops += 1;
            }
        }

        if self.gram[l][l].is_zero() {
            return Err(LatticeError::DependentRows { row: l });
        }
        self.guard_bstar(l);
        Ok(())
    }

    /// Catastrophic cancellation can leave `||b*_l||^2` non-positive for rows
    /// that are long relative to their orthogonal part (raw HNF inputs). Such a
    /// value is replaced by a tiny positive fraction of `||b_l||^2`, which keeps
    /// every downstream ratio finite; the reduction loop then moves the row
    /// forward exactly as it would for the true, tiny value.
    fn guard_bstar(&mut self, l: usize) {
        let c = self.gso.bstar_sq[l];
        if !(c > F::zero()) || !c.is_finite() {
            let norm: F = self.gram[l][l].to_float();
            let floor = norm.mul_pow2(-200);
            warn!("row {l}: ||b*||^2 = {c:?} lost to cancellation, clamped");
            self.gso.bstar_sq[l] = floor;
            if let Some(last) = self.proj.last_mut() {
                *last = floor;
            }
        }
    }
}

struct ComputeAll;

impl<F: GsoFloat> GsoBody<F> for ComputeAll {
    type Output = GsoState<F>;

    fn run<S: Scalar>(&mut self, lat: &mut GsoBasis<S, F>, _: &mut ReductionStats) -> Result<GsoState<F>> {
        lat.compute_all()?;
        Ok(lat.gso.clone())
    }
}

/// Float results with `||b*_i||^2 < CANCELLATION_LIMIT ||b_i||^2` are
/// recomputed exactly.
const CANCELLATION_LIMIT: f64 = 1.0 / (1u64 << 20) as f64;

/// Full Gram–Schmidt data of `basis`.
///
/// Integer bases whose floating-point computation loses more than 20 bits
/// to cancellation (typical for unreduced bases with huge entries, such as
/// HNF bases) are recomputed exactly and rounded, so dependent rows are only
/// reported when they really are dependent.
pub fn compute_gso<T: Entry, F: GsoFloat>(basis: &Basis<T>) -> Result<GsoState<F>> {
    let mut b = basis.clone();
    let float = with_scalar(&mut b, &mut ReductionStats::default(), &mut ComputeAll);
    let Some(int) = (basis as &dyn Any).downcast_ref::<IntBasis>() else {
        return float;
    };
    let cancelled = match &float {
        Ok(g) => (0..g.rank()).any(|i| {
            let norm: F = int.norm_sq(i).to_float();
            (g.bstar_sq(i) / norm).to_f64() < CANCELLATION_LIMIT
        }),
        Err(LatticeError::DependentRows { .. }) => true,
        Err(_) => false,
    };
    if cancelled {
        log::debug!("recomputing Gram-Schmidt data exactly");
        exact_gso(int)
    } else {
        float
    }
}

/// `a / b` rounded into `F`, for integers of any size.
fn ratio<F: GsoFloat>(a: &BigInt, b: &BigInt) -> F {
    let split = |x: &BigInt| -> (f64, i64) {
        let shift = x.bits().saturating_sub(64);
        ((x >> shift).to_f64().expect("64-bit value"), shift as i64)
    };
    let (am, ae) = split(a);
    let (bm, be) = split(b);
    F::from_f64(am / bm).mul_pow2((ae - be) as i32)
}

fn exact_gso<F: GsoFloat>(basis: &IntBasis) -> Result<GsoState<F>> {
    let (d, lambda) = integral_gso(basis)?;
    let n = basis.rank();
    let mut g = GsoState::new(n);
    let one = BigInt::from(1);
    for i in 0..n {
        g.bstar_sq[i] = ratio(&d[i], if i == 0 { &one } else { &d[i - 1] });
        for j in 0..i {
            g.mu[i][j] = ratio(&lambda[i][j], &d[j]);
            g.r[i][j] = ratio(&lambda[i][j], if j == 0 { &one } else { &d[j - 1] });
        }
    }
    g.valid_prefix = n;
    Ok(g)
}
