//! Exact integer and rational computations for small bases.
//!
//! Everything here is meant for verification. Apart from [`integral_gso`],
//! ranks are capped at [`MAX_EXACT_RANK`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{LatticeError, Result};
use crate::types::{Basis, Entry};

pub const MAX_EXACT_RANK: usize = 12;

fn check_rank(n: usize) -> Result<()> {
    if n > MAX_EXACT_RANK {
        Err(LatticeError::ExactModeTooLarge { n, max: MAX_EXACT_RANK })
    } else {
        Ok(())
    }
}

/// The Gram matrix `B B^T`.
pub fn gram_matrix(basis: &Basis) -> Vec<Vec<BigInt>> {
    let rows = basis.rows();
    rows.iter().map(|a| rows.iter().map(|b| BigInt::dot(a, b)).collect()).collect()
}

/// Fraction-free Gram–Schmidt data with no rank cap: `d[i]` is the Gram
/// determinant of rows `0..=i` and `lambda[i][j] = d[j] mu_{i,j}` for
/// `j < i`, all exact integers. Fails on dependent rows.
pub fn integral_gso(basis: &Basis) -> Result<(Vec<BigInt>, Vec<Vec<BigInt>>)> {
    let n = basis.rank();
    let rows = basis.rows();
    let mut d: Vec<BigInt> = Vec::with_capacity(n);
    let mut lambda: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut lam_i: Vec<BigInt> = Vec::with_capacity(i);
        for j in 0..=i {
            let mut u = BigInt::dot(&rows[i], &rows[j]);
            for k in 0..j {
                let lam_jk = if j == i { &lam_i[k] } else { &lambda[j][k] };
                u = (&d[k] * u - &lam_i[k] * lam_jk) / if k == 0 { BigInt::one() } else { d[k - 1].clone() };
            }
            if j < i {
                lam_i.push(u);
            } else if u.is_positive() {
                d.push(u);
            } else {
                return Err(LatticeError::DependentRows { row: i });
            }
        }
        lambda.push(lam_i);
    }
    Ok((d, lambda))
}

/// Leading principal minors of a square integer matrix, by fraction-free
/// (Bareiss) elimination without pivoting. Returns `None` when a minor
/// vanishes before the last step.
pub fn leading_minors(mut a: Vec<Vec<BigInt>>) -> Option<Vec<BigInt>> {
    let n = a.len();
    let mut minors = Vec::with_capacity(n);
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = a[k][k].clone();
        minors.push(pivot.clone());
        if k + 1 == n {
            break;
        }
        if Zero::is_zero(&pivot) {
            return None;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &pivot - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = pivot;
    }
    Some(minors)
}

/// `d_j = det(B_j B_j^T)` for the prefixes `B_1, …, B_n`.
pub fn gram_determinants(basis: &Basis) -> Result<Vec<BigInt>> {
    check_rank(basis.rank())?;
    let minors = leading_minors(gram_matrix(basis)).ok_or(LatticeError::DependentRows { row: 0 })?;
    if let Some(i) = minors.iter().position(|d| !d.is_positive()) {
        return Err(LatticeError::DependentRows { row: i });
    }
    Ok(minors)
}

/// `vol(L)^2 = det(B B^T)`.
pub fn volume_sq(basis: &Basis) -> Result<BigInt> {
    Ok(gram_determinants(basis)?.pop().expect("rank >= 1"))
}

/// `Pot(B) = prod_j d_j`, an integer for integer bases.
pub fn potential(basis: &Basis) -> Result<BigInt> {
    Ok(gram_determinants(basis)?.iter().product())
}

/// `ln Pot(B)` via the exact potential.
pub fn log_potential(basis: &Basis) -> Result<f64> {
    Ok(ln_bigint(&potential(basis)?))
}

/// `ln |x|` for a nonzero integer of any size.
pub fn ln_bigint(x: &BigInt) -> f64 {
    x.log2_abs() * std::f64::consts::LN_2
}

pub fn ln_rational(x: &BigRational) -> f64 {
    ln_bigint(x.numer()) - ln_bigint(x.denom())
}

/// Exact Gram–Schmidt data: `mu[i][j]` for `j < i` and `||b*_i||^2`.
#[derive(Clone, Debug)]
pub struct ExactGso {
    pub mu: Vec<Vec<BigRational>>,
    pub bstar_sq: Vec<BigRational>,
}

impl ExactGso {
    #[allow(clippy::needless_range_loop)]
    pub fn new(basis: &Basis) -> Result<Self> {
        check_rank(basis.rank())?;
        let n = basis.rank();
        let g = gram_matrix(basis);
        let mut mu: Vec<Vec<BigRational>> = Vec::with_capacity(n);
        let mut r: Vec<Vec<BigRational>> = Vec::with_capacity(n);
        let mut bstar_sq: Vec<BigRational> = Vec::with_capacity(n);
        for i in 0..n {
            let mut r_i = Vec::with_capacity(i);
            let mut mu_i = Vec::with_capacity(i);
            for j in 0..i {
                let mut v = BigRational::from_integer(g[i][j].clone());
                for k in 0..j {
                    v -= &mu[j][k] * &r_i[k];
                }
                mu_i.push(&v / &bstar_sq[j]);
                r_i.push(v);
            }
            let mut c = BigRational::from_integer(g[i][i].clone());
            for k in 0..i {
                c -= &mu_i[k] * &r_i[k];
            }
            if !c.is_positive() {
                return Err(LatticeError::DependentRows { row: i });
            }
            mu.push(mu_i);
            r.push(r_i);
            bstar_sq.push(c);
        }
        Ok(ExactGso { mu, bstar_sq })
    }

    pub fn rank(&self) -> usize {
        self.bstar_sq.len()
    }

    /// `||pi_k(b_i)||^2` for `k <= i` (0-based).
    pub fn projected_norm_sq(&self, i: usize, k: usize) -> BigRational {
        let mut acc = self.bstar_sq[i].clone();
        for j in k..i {
            acc += &self.mu[i][j] * &self.mu[i][j] * &self.bstar_sq[j];
        }
        acc
    }

    /// `P_{k,l} = Pot(sigma_{k,l} B) / Pot(B) = prod_{i=k}^{l} ||pi_i(b_l)||^2 / ||pi_i(b_i)||^2`.
    pub fn potential_ratio(&self, k: usize, l: usize) -> BigRational {
        let mut p = BigRational::one();
        for i in k..=l {
            p *= self.projected_norm_sq(l, i) / &self.bstar_sq[i];
        }
        p
    }

    pub fn is_size_reduced(&self) -> bool {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        self.mu.iter().flatten().all(|m| m.abs() <= half)
    }
}

/// Exact rational value of a finite `f64`.
pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minors_of_diagonal() {
        let b = Basis::diagonal(&[2, 3, 5]);
        assert_eq!(gram_determinants(&b).unwrap(), vec![BigInt::from(4), BigInt::from(36), BigInt::from(900)]);
        assert_eq!(volume_sq(&b).unwrap(), BigInt::from(900));
    }

    #[test]
    fn potential_of_small_bases() {
        assert_eq!(potential(&Basis::identity(4)).unwrap(), BigInt::one());
        assert_eq!(potential(&Basis::diagonal(&[2, 1])).unwrap(), BigInt::from(16));
    }

    #[test]
    fn exact_gso_by_hand() {
        let b = Basis::from_i64(&[vec![1, 0], vec![1, 2]]).unwrap();
        let g = ExactGso::new(&b).unwrap();
        assert_eq!(g.mu[1][0], BigRational::one());
        assert_eq!(g.bstar_sq[1], BigRational::from_integer(4.into()));
        assert_eq!(g.projected_norm_sq(1, 0), BigRational::from_integer(5.into()));
    }

    #[test]
    fn rank_cap() {
        assert!(matches!(potential(&Basis::identity(13)), Err(LatticeError::ExactModeTooLarge { n: 13, .. })));
    }

    #[test]
    fn dependent_rows_detected() {
        let b = Basis::from_i64(&[vec![1, 2, 3], vec![2, 4, 6]]).unwrap();
        assert!(gram_determinants(&b).is_err());
        assert!(ExactGso::new(&b).is_err());
    }
}
