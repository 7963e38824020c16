//! Independent oracles shared by the integration suites.
#![allow(dead_code, clippy::needless_range_loop)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use potlll_core::exact::integral_gso;
use potlll_core::{generate_random_hnf, GenSpec, IntBasis};

/// splitmix64.
pub struct Rng(pub u64);

impl Rng {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `lo..=hi`, slightly biased; fine for test inputs.
    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as i64
    }
}

/// An `n × m` basis with entries in `[-bound, bound]`, redrawn until
/// independent.
pub fn random_basis(rng: &mut Rng, n: usize, m: usize, bound: i64) -> IntBasis {
    loop {
        let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..m).map(|_| rng.range(-bound, bound)).collect()).collect();
        let b = IntBasis::from_i64(&rows).unwrap();
        if integral_gso(&b).is_ok_and(|(d, _)| d.len() == n && d.iter().all(|x| x.is_positive())) {
            return b;
        }
    }
}

/// A mix of small dense bases, wide bases and generated HNF bases.
pub fn mixed_basis(rng: &mut Rng, n: usize) -> IntBasis {
    match rng.next_u64() % 3 {
        0 => random_basis(rng, n, n, 50),
        1 => random_basis(rng, n, n + 2, 1000),
        _ => generate_random_hnf(&GenSpec::new(n, rng.next_u64())).unwrap(),
    }
}

/// Row-style Hermite normal form of the lattice spanned by `rows`: echelon
/// form with positive pivots and entries above each pivot reduced into
/// `[0, pivot)`. Zero rows are dropped.
pub fn hnf(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let n = a.len();
    let m = if n == 0 { 0 } else { a[0].len() };
    let mut r = 0;
    for c in 0..m {
        if r == n {
            break;
        }
        loop {
            let pivot = (r..n).filter(|&i| !a[i][c].is_zero()).min_by(|&i, &j| a[i][c].abs().cmp(&a[j][c].abs()));
            let Some(p) = pivot else { break };
            a.swap(r, p);
            let mut done = true;
            for i in r + 1..n {
                if a[i][c].is_zero() {
                    continue;
                }
                let q = a[i][c].div_floor(&a[r][c]);
                for j in c..m {
                    let t = &q * &a[r][j];
                    a[i][j] -= t;
                }
                if !a[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            for x in a[r].iter_mut() {
                *x = -&*x;
            }
        }
        for i in 0..r {
            let q = a[i][c].div_floor(&a[r][c]);
            if !q.is_zero() {
                for j in c..m {
                    let t = &q * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    a
}

pub fn hnf_of(b: &IntBasis) -> Vec<Vec<BigInt>> {
    hnf(b.rows())
}

/// Gram matrix of rows `k..=h` projected orthogonally to rows `0..k`, exact.
pub fn projected_gram(b: &IntBasis, k: usize, h: usize) -> Vec<Vec<BigRational>> {
    let dot = |i: usize, j: usize| -> BigRational {
        BigRational::from_integer(b.row(i).iter().zip(b.row(j)).map(|(x, y)| x * y).sum())
    };
    // Schur complement of the leading k × k block
    let mut g: Vec<Vec<BigRational>> = (0..=h).map(|i| (0..=h).map(|j| dot(i, j)).collect()).collect();
    for p in 0..k {
        for i in p + 1..=h {
            let f = &g[i][p] / &g[p][p];
            for j in p..=h {
                let t = &f * &g[p][j];
                g[i][j] -= t;
            }
        }
    }
    (k..=h).map(|i| (k..=h).map(|j| g[i][j].clone()).collect()).collect()
}

/// Minimum of `x^T G x` over nonzero integer `x` by exhaustive search of the
/// Fincke–Pohst box `|x_i| <= sqrt(A (G^{-1})_{ii})`, with `A` the smallest
/// diagonal entry. Exact: the form is scaled to integers and evaluated in
/// `i128`.
pub fn brute_force_min(g: &[Vec<BigRational>]) -> BigRational {
    let d = g.len();
    let scale = g.iter().flatten().fold(BigInt::from(1), |l, q| l.lcm(q.denom()));
    let scaled: Vec<Vec<BigInt>> =
        g.iter().map(|row| row.iter().map(|q| (q * &scale).to_integer()).collect()).collect();
    let a = g.iter().enumerate().map(|(i, row)| row[i].clone()).min().unwrap();
    let radius: Vec<i64> = inverse_diagonal(g)
        .iter()
        .map(|v| ((a.to_f64().unwrap() * v).sqrt() * (1.0 + 1e-9) + 1e-9).floor() as i64)
        .collect();
    let small: Option<Vec<Vec<i128>>> =
        scaled.iter().map(|row| row.iter().map(|x| x.to_i128().filter(|v| v.abs() < 1 << 100)).collect()).collect();
    let best = match small {
        Some(m) => BigInt::from(box_min(&radius, |x| {
            let mut q: i128 = 0;
            for i in 0..d {
                if x[i] != 0 {
                    let row: i128 = (0..d).map(|j| m[i][j] * x[j] as i128).sum();
                    q += row * x[i] as i128;
                }
            }
            q
        })),
        None => box_min(&radius, |x| {
            let mut q = BigInt::zero();
            for i in 0..d {
                if x[i] != 0 {
                    let row: BigInt = (0..d).filter(|&j| x[j] != 0).map(|j| &scaled[i][j] * x[j]).sum();
                    q += row * x[i];
                }
            }
            q
        }),
    };
    BigRational::new(best, scale)
}

/// Smallest value of `form` over the nonzero points of the box.
fn box_min<T: Ord>(radius: &[i64], mut form: impl FnMut(&[i64]) -> T) -> T {
    let mut x: Vec<i64> = radius.iter().map(|r| -r).collect();
    let mut best: Option<T> = None;
    loop {
        if x.iter().any(|&v| v != 0) {
            let q = form(&x);
            if best.as_ref().is_none_or(|b| q < *b) {
                best = Some(q);
            }
        }
        let mut i = 0;
        loop {
            if i == x.len() {
                return best.expect("the box holds a unit vector");
            }
            if x[i] < radius[i] {
                x[i] += 1;
                break;
            }
            x[i] = -radius[i];
            i += 1;
        }
    }
}

fn inverse_diagonal(g: &[Vec<BigRational>]) -> Vec<f64> {
    let d = g.len();
    let mut a: Vec<Vec<BigRational>> = g.to_vec();
    let mut inv: Vec<Vec<BigRational>> =
        (0..d).map(|i| (0..d).map(|j| BigRational::from_integer(BigInt::from((i == j) as i64))).collect()).collect();
    for p in 0..d {
        let piv = a[p][p].clone();
        for j in 0..d {
            a[p][j] = &a[p][j] / &piv;
            inv[p][j] = &inv[p][j] / &piv;
        }
        for i in 0..d {
            if i != p && !a[i][p].is_zero() {
                let f = a[i][p].clone();
                for j in 0..d {
                    let t = &f * &a[p][j];
                    a[i][j] -= t;
                    let t = &f * &inv[p][j];
                    inv[i][j] -= t;
                }
            }
        }
    }
    (0..d).map(|i| inv[i][i].to_f64().unwrap()).collect()
}

/// `lambda_1^2` of the lattice spanned by `b`.
pub fn shortest_norm_sq(b: &IntBasis) -> BigInt {
    let m = brute_force_min(&projected_gram(b, 0, b.rank() - 1));
    assert!(m.is_integer());
    m.to_integer()
}

pub fn norm_sq(row: &[BigInt]) -> BigInt {
    row.iter().map(|x| x * x).sum()
}
