//! Shortest vectors of projected blocks by Schnorr–Euchner enumeration.
//!
//! Depth-first search over integer coefficient vectors, visiting the
//! candidates of each level in zig-zag order around the projected center and
//! pruning on the partial squared norm. There is no other pruning, so the
//! result is exact up to floating-point rounding in the Gram–Schmidt data.

use crate::error::{LatticeError, Result};
use crate::float::GsoFloat;
use crate::gso::GsoState;

/// A shortest vector found in a projected block.
#[derive(Clone, Debug, PartialEq)]
pub struct EnumResult<F = f64> {
    /// Coefficients with respect to `b_k, …, b_j`; never all zero.
    pub coeffs: Vec<i64>,
    /// `||sum_i coeffs[i] pi_k(b_{k+i})||^2`.
    pub norm_sq: F,
}

struct Search {
    /// `mu[i][t]` of the block, `t < i`.
    mu: Vec<Vec<f64>>,
    /// `||b*||^2` of the block in units of the first one.
    bstar: Vec<f64>,
    x: Vec<i64>,
    radius: f64,
    best: Option<(Vec<i64>, f64)>,
}

impl Search {
    fn center(&self, i: usize) -> f64 {
        -(i + 1..self.x.len()).map(|t| self.x[t] as f64 * self.mu[t][i]).sum::<f64>()
    }

    /// Enumerates level `i` given the partial norm of the levels above.
    /// While everything above is zero only `x_i >= 0` is tried, which
    /// removes the `±v` symmetry.
    fn level(&mut self, i: usize, above: f64, zero_above: bool) {
        let c = if zero_above { 0.0 } else { self.center(i) };
        let r = c.round();
        let dir = if c >= r { 1 } else { -1 };
        let mut step: i64 = 0;
        loop {
            let xi = if zero_above {
                step
            } else {
                // r, r+dir, r-dir, r+2dir, r-2dir, ...
                let m = (step + 1) / 2;
                r as i64 + if step % 2 == 1 { dir * m } else { -dir * m }
            };
            step += 1;
            if zero_above && i == 0 && xi == 0 {
                continue;
            }
            let diff = xi as f64 - c;
            let dist = above + diff * diff * self.bstar[i];
            if !(dist < self.radius) {
                break;
            }
            self.x[i] = xi;
            if i == 0 {
                self.radius = dist;
                self.best = Some((self.x.clone(), dist));
            } else {
                self.level(i - 1, dist, zero_above && xi == 0);
            }
        }
        self.x[i] = 0;
    }
}

/// The nonzero integer combination of `pi_k(b_k), …, pi_k(b_j)` (0-based,
/// inclusive) of smallest squared norm, provided that norm is below `bound`.
///
/// Rows `k..=j` must be current in `gso`.
pub fn svp_enumerate<F: GsoFloat>(gso: &GsoState<F>, k: usize, j: usize, bound: F) -> Result<Option<EnumResult<F>>> {
    let n = gso.rank();
    if k > j || j >= n {
        return Err(LatticeError::IndexOutOfBounds { k, l: j, n });
    }
    gso.require(j + 1)?;
    let scale = gso.bstar_sq(k);
    let d = j - k + 1;
    let mut search = Search {
        mu: (0..d).map(|i| (0..i).map(|t| gso.mu(k + i, k + t).to_f64()).collect()).collect(),
        bstar: (0..d).map(|i| (gso.bstar_sq(k + i) / scale).to_f64()).collect(),
        x: vec![0; d],
        radius: (bound / scale).to_f64(),
        best: None,
    };
    if !(search.radius > 0.0) {
        return Ok(None);
    }
    search.level(d - 1, 0.0, true);
    Ok(search.best.map(|(coeffs, dist)| EnumResult { coeffs, norm_sq: F::from_f64(dist) * scale }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gso::compute_gso;
    use crate::types::Basis;

    #[test]
    fn single_row_block() {
        let g: GsoState = compute_gso(&Basis::diagonal(&[2, 3])).unwrap();
        let r = svp_enumerate(&g, 1, 1, 10.0).unwrap().unwrap();
        assert_eq!(r, EnumResult { coeffs: vec![1], norm_sq: 9.0 });
        assert_eq!(svp_enumerate(&g, 1, 1, 9.0).unwrap(), None);
    }

    #[test]
    fn diagonal_block() {
        let g: GsoState = compute_gso(&Basis::diagonal(&[2, 3])).unwrap();
        let r = svp_enumerate(&g, 0, 1, 10.0).unwrap().unwrap();
        assert_eq!(r, EnumResult { coeffs: vec![1, 0], norm_sq: 4.0 });
    }

    #[test]
    fn finds_combination() {
        // (5,0), (4,1): (4,1) - (5,0) = (-1,1) has norm 2
        let g: GsoState = compute_gso(&Basis::from_i64(&[vec![5, 0], vec![4, 1]]).unwrap()).unwrap();
        let r = svp_enumerate(&g, 0, 1, 25.0).unwrap().unwrap();
        assert!((r.norm_sq - 2.0).abs() < 1e-12);
        assert!(r.coeffs == vec![-1, 1] || r.coeffs == vec![1, -1]);
    }

    #[test]
    fn projected_block() {
        // projections (0,3,4) and (0,0,5); their difference has norm 10
        let b = Basis::from_i64(&[vec![1, 0, 0], vec![7, 3, 4], vec![2, 0, 5]]).unwrap();
        let g: GsoState = compute_gso(&b).unwrap();
        let r = svp_enumerate(&g, 1, 2, 100.0).unwrap().unwrap();
        assert!((r.norm_sq - 10.0).abs() < 1e-9);
    }

    #[test]
    fn bad_indices() {
        let g: GsoState = compute_gso(&Basis::identity(3)).unwrap();
        assert!(svp_enumerate(&g, 2, 1, 1.0).is_err());
        assert!(svp_enumerate(&g, 0, 3, 1.0).is_err());
    }
}
