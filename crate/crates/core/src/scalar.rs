//! Working integer types for the reduction loops.
//!
//! Public bases hold `BigInt` (or `f64`). While a reducer runs, the rows and
//! the exact Gram matrix are held in a [`Scalar`] type picked from the input
//! magnitudes: checked `i64` when every squared row norm stays below
//! `2^I64_NORM_LOG2`, [`MixedInt`] otherwise. A machine-integer run that
//! overflows is restarted from its input with [`MixedInt`].

use std::any::Any;
use std::fmt;

use log::debug;
use num_bigint::{BigInt, Sign};
use rug::integer::Order;
use rug::Integer;

use crate::error::{LatticeError, Result};
use crate::float::{ExtFloat, FloatKind, GsoFloat};
use crate::gso::GsoBasis;
use crate::types::{Basis, Entry, IntBasis, RealBasis, ReductionStats};

/// Squared norms up to `2^I64_NORM_LOG2` run in `i64`. Row entries and Gram
/// entries are then bounded by `2^62`, and a size-reduction step can at most
/// double them before the first overflow check trips.
pub const I64_NORM_LOG2: f64 = 60.0;

/// Arithmetic needed by [`GsoBasis`]. Fallible operations only fail for
/// machine integers, with [`LatticeError::MachineIntegerOverflow`].
pub(crate) trait Scalar: Clone + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn dot(a: &[Self], b: &[Self]) -> Result<Self>;
    /// `self -= x * rhs`
    fn sub_mul(&mut self, x: &Self, rhs: &Self) -> Result<()>;
    fn add_assign(&mut self, rhs: &Self) -> Result<()>;
    /// Nearest integer (ties away from zero); exact for `f64` scalars too.
    fn round_from<F: GsoFloat>(x: F) -> Result<Self>;
    fn to_float<F: GsoFloat>(&self) -> F;
}

fn overflow() -> LatticeError {
    LatticeError::MachineIntegerOverflow
}

impl Scalar for i64 {
    #[inline]
    fn zero() -> Self {
        0
    }
    #[inline]
    fn from_i64(v: i64) -> Self {
        v
    }
    #[inline]
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn dot(a: &[Self], b: &[Self]) -> Result<Self> {
        let acc: i128 = a.iter().zip(b).map(|(&x, &y)| i128::from(x) * i128::from(y)).sum();
        i64::try_from(acc).map_err(|_| overflow())
    }
    #[inline]
    fn sub_mul(&mut self, x: &Self, rhs: &Self) -> Result<()> {
        let v = i128::from(*self) - i128::from(*x) * i128::from(*rhs);
        *self = i64::try_from(v).map_err(|_| overflow())?;
        Ok(())
    }
    #[inline]
    fn add_assign(&mut self, rhs: &Self) -> Result<()> {
        *self = self.checked_add(*rhs).ok_or_else(overflow)?;
        Ok(())
    }
    #[inline]
    fn round_from<F: GsoFloat>(x: F) -> Result<Self> {
        let v = x.to_f64().round();
        if v.is_finite() && v.abs() < 9.0e18 {
            Ok(v as i64)
        } else {
            Err(overflow())
        }
    }
    #[inline]
    fn to_float<F: GsoFloat>(&self) -> F {
        F::from_f64(*self as f64)
    }
}

/// An integer stored inline while it fits in 64 bits and in GMP otherwise.
/// Reduced rows and most Gram entries stay small even when a few entries of
/// the same basis are thousands of bits long.
#[derive(Clone, Debug)]
pub(crate) enum MixedInt {
    Small(i64),
    Big(Integer),
}

impl MixedInt {
    #[inline]
    fn from_i128(v: i128) -> Self {
        match i64::try_from(v) {
            Ok(v) => MixedInt::Small(v),
            Err(_) => MixedInt::Big(Integer::from(v)),
        }
    }

    #[inline]
    fn demoted(v: Integer) -> Self {
        match v.to_i64() {
            Some(v) => MixedInt::Small(v),
            None => MixedInt::Big(v),
        }
    }

    fn take_big(&mut self) -> Integer {
        match std::mem::replace(self, MixedInt::Small(0)) {
            MixedInt::Small(v) => Integer::from(v),
            MixedInt::Big(v) => v,
        }
    }

    pub(crate) fn from_bigint(x: &BigInt) -> Self {
        match i64::try_from(x) {
            Ok(v) => MixedInt::Small(v),
            Err(_) => MixedInt::Big(bigint_to_integer(x)),
        }
    }

    pub(crate) fn to_bigint(&self) -> BigInt {
        match self {
            MixedInt::Small(v) => BigInt::from(*v),
            MixedInt::Big(v) => integer_to_bigint(v),
        }
    }
}

impl Scalar for MixedInt {
    #[inline]
    fn zero() -> Self {
        MixedInt::Small(0)
    }

    #[inline]
    fn from_i64(v: i64) -> Self {
        MixedInt::Small(v)
    }

    #[inline]
    fn is_zero(&self) -> bool {
        // big values are demoted, so a `Big` is never zero
        matches!(self, MixedInt::Small(0))
    }

    fn dot(a: &[Self], b: &[Self]) -> Result<Self> {
        let mut small: i128 = 0;
        let mut big: Option<Integer> = None;
        for (x, y) in a.iter().zip(b) {
            match (x, y) {
                (MixedInt::Small(0), _) | (_, MixedInt::Small(0)) => {}
                (MixedInt::Small(x), MixedInt::Small(y)) => {
                    let p = i128::from(*x) * i128::from(*y);
                    match small.checked_add(p) {
                        Some(v) => small = v,
                        None => {
                            *big.get_or_insert_with(Integer::new) += small;
                            small = p;
                        }
                    }
                }
                (MixedInt::Small(x), MixedInt::Big(y)) | (MixedInt::Big(y), MixedInt::Small(x)) => {
                    *big.get_or_insert_with(Integer::new) += y * *x;
                }
                (MixedInt::Big(x), MixedInt::Big(y)) => {
                    *big.get_or_insert_with(Integer::new) += x * y;
                }
            }
        }
        Ok(match big {
            None => MixedInt::from_i128(small),
            Some(mut v) => {
                v += small;
                MixedInt::demoted(v)
            }
        })
    }

    #[inline]
    fn sub_mul(&mut self, x: &Self, rhs: &Self) -> Result<()> {
        if x.is_zero() || rhs.is_zero() {
            return Ok(());
        }
        if let (MixedInt::Small(a), MixedInt::Small(b), MixedInt::Small(c)) = (&*self, x, rhs) {
            *self = MixedInt::from_i128(i128::from(*a) - i128::from(*b) * i128::from(*c));
            return Ok(());
        }
        let mut acc = self.take_big();
        match (x, rhs) {
            (MixedInt::Small(b), MixedInt::Small(c)) => acc -= Integer::from(i128::from(*b) * i128::from(*c)),
            (MixedInt::Small(b), MixedInt::Big(c)) | (MixedInt::Big(c), MixedInt::Small(b)) => acc -= c * *b,
            (MixedInt::Big(b), MixedInt::Big(c)) => acc -= b * c,
        }
        *self = MixedInt::demoted(acc);
        Ok(())
    }

    fn add_assign(&mut self, rhs: &Self) -> Result<()> {
        if let (MixedInt::Small(a), MixedInt::Small(b)) = (&*self, rhs) {
            *self = MixedInt::from_i128(i128::from(*a) + i128::from(*b));
            return Ok(());
        }
        let mut acc = self.take_big();
        match rhs {
            MixedInt::Small(b) => acc += *b,
            MixedInt::Big(b) => acc += b,
        }
        *self = MixedInt::demoted(acc);
        Ok(())
    }

    fn round_from<F: GsoFloat>(x: F) -> Result<Self> {
        let v = x.to_f64();
        if v.is_finite() && v.abs() < 4.0e18 {
            Ok(MixedInt::Small(v.round() as i64))
        } else {
            Ok(MixedInt::from_bigint(&x.round_to_bigint()))
        }
    }

    #[inline]
    fn to_float<F: GsoFloat>(&self) -> F {
        match self {
            MixedInt::Small(v) => F::from_f64(*v as f64),
            MixedInt::Big(v) => {
                let (m, e) = v.to_f64_exp();
                F::from_f64(m).mul_pow2(e as i32)
            }
        }
    }
}

impl Scalar for f64 {
    #[inline]
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    #[inline]
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn dot(a: &[Self], b: &[Self]) -> Result<Self> {
        Ok(a.iter().zip(b).map(|(x, y)| x * y).sum())
    }
    #[inline]
    fn sub_mul(&mut self, x: &Self, rhs: &Self) -> Result<()> {
        *self -= x * rhs;
        Ok(())
    }
    #[inline]
    fn add_assign(&mut self, rhs: &Self) -> Result<()> {
        *self += rhs;
        Ok(())
    }
    #[inline]
    fn round_from<F: GsoFloat>(x: F) -> Result<Self> {
        Ok(x.to_f64().round())
    }
    #[inline]
    fn to_float<F: GsoFloat>(&self) -> F {
        F::from_f64(*self)
    }
}

pub(crate) fn bigint_to_integer(x: &BigInt) -> Integer {
    let (sign, digits) = x.to_u64_digits();
    let v = Integer::from_digits(&digits, Order::Lsf);
    if sign == Sign::Minus {
        -v
    } else {
        v
    }
}

pub(crate) fn integer_to_bigint(x: &Integer) -> BigInt {
    let digits = x.to_digits::<u32>(Order::Lsf);
    let sign = match x.cmp0() {
        std::cmp::Ordering::Less => Sign::Minus,
        std::cmp::Ordering::Equal => Sign::NoSign,
        std::cmp::Ordering::Greater => Sign::Plus,
    };
    BigInt::from_slice(sign, &digits)
}

/// A computation over a [`GsoBasis`] that is generic in the working scalar.
/// `run` may be called a second time (with fresh rows and reset statistics)
/// after a machine-integer overflow.
pub(crate) trait GsoBody<F: GsoFloat> {
    type Output;
    fn run<S: Scalar>(&mut self, lat: &mut GsoBasis<S, F>, stats: &mut ReductionStats) -> Result<Self::Output>;
}

fn run_rows<S: Scalar, F: GsoFloat, B: GsoBody<F>>(
    rows: Vec<Vec<S>>,
    stats: &mut ReductionStats,
    body: &mut B,
) -> (Vec<Vec<S>>, Result<B::Output>) {
    let mut lat: GsoBasis<S, F> = GsoBasis::from_rows(rows);
    let out = body.run(&mut lat, stats);
    (lat.into_rows(), out)
}

fn run_integral<F: GsoFloat, B: GsoBody<F>>(
    basis: &mut IntBasis,
    stats: &mut ReductionStats,
    body: &mut B,
) -> Result<B::Output> {
    if basis.max_norm_sq_log2() <= I64_NORM_LOG2 {
        let rows: Vec<Vec<i64>> = basis
            .rows()
            .iter()
            .map(|r| r.iter().map(|x| i64::try_from(x).expect("bounded by the norm check")).collect())
            .collect();
        let snapshot = stats.clone();
        let (rows, out) = run_rows::<i64, F, B>(rows, stats, body);
        if !matches!(out, Err(LatticeError::MachineIntegerOverflow)) {
            basis.replace_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect());
            return out;
        }
        debug!("machine integers overflowed, restarting with arbitrary precision");
        *stats = snapshot;
    }
    let rows: Vec<Vec<MixedInt>> = basis.rows().iter().map(|r| r.iter().map(MixedInt::from_bigint).collect()).collect();
    let (rows, out) = run_rows::<MixedInt, F, B>(rows, stats, body);
    basis.replace_rows(rows.iter().map(|r| r.iter().map(MixedInt::to_bigint).collect()).collect());
    out
}

fn run_real<F: GsoFloat, B: GsoBody<F>>(
    basis: &mut RealBasis,
    stats: &mut ReductionStats,
    body: &mut B,
) -> Result<B::Output> {
    let (rows, out) = run_rows::<f64, F, B>(basis.take_rows(), stats, body);
    basis.replace_rows(rows);
    out
}

/// Runs `body` on `basis` with float type `F` and the working scalar chosen
/// from the entry type and magnitudes. The rows are written back also when
/// `body` fails.
pub(crate) fn with_scalar<T: Entry, F: GsoFloat, B: GsoBody<F>>(
    basis: &mut Basis<T>,
    stats: &mut ReductionStats,
    body: &mut B,
) -> Result<B::Output> {
    let any = basis as &mut dyn Any;
    if let Some(b) = any.downcast_mut::<IntBasis>() {
        return run_integral(b, stats, body);
    }
    let any = basis as &mut dyn Any;
    if let Some(b) = any.downcast_mut::<RealBasis>() {
        return run_real(b, stats, body);
    }
    unreachable!("Entry is implemented for BigInt and f64 only")
}

/// [`with_scalar`] with the float type picked by `kind`.
pub(crate) fn with_float_kind<T, B, R>(
    basis: &mut Basis<T>,
    kind: FloatKind,
    stats: &mut ReductionStats,
    body: &mut B,
) -> Result<R>
where
    T: Entry,
    B: GsoBody<f64, Output = R> + GsoBody<ExtFloat, Output = R>,
{
    match kind {
        FloatKind::ExtendedOrEmulated => with_scalar::<T, ExtFloat, B>(basis, stats, body),
        _ => with_scalar::<T, f64, B>(basis, stats, body),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions_round_trip() {
        for s in ["0", "1", "-1", "123456789012345678901234567890", "-98765432109876543210987654321"] {
            let b: BigInt = s.parse().unwrap();
            let i = bigint_to_integer(&b);
            assert_eq!(i.to_string(), s);
            assert_eq!(integer_to_bigint(&i), b);
        }
    }

    #[test]
    fn machine_integers_report_overflow() {
        let mut x = i64::MAX - 1;
        assert!(x.sub_mul(&-1, &1).is_ok());
        assert!(matches!(x.sub_mul(&-1, &1), Err(LatticeError::MachineIntegerOverflow)));
        assert!(matches!(i64::round_from(1e19f64), Err(LatticeError::MachineIntegerOverflow)));
        assert!(matches!(i64::dot(&[1 << 40], &[1 << 40]), Err(LatticeError::MachineIntegerOverflow)));
    }

    fn mixed(s: &str) -> MixedInt {
        MixedInt::from_bigint(&s.parse().unwrap())
    }

    #[test]
    fn mixed_float_conversion() {
        let x: BigInt = BigInt::from(12345) << 3000u32;
        let m = MixedInt::from_bigint(&x);
        let e: ExtFloat = m.to_float();
        assert!((e.log2() - (12345f64.log2() + 3000.0)).abs() < 1e-12);
        assert_eq!(MixedInt::round_from(e).unwrap().to_bigint(), x);
        assert!(matches!(MixedInt::round_from(-2.5f64).unwrap(), MixedInt::Small(-3)));
    }

    #[test]
    fn mixed_arithmetic_matches_bigint() {
        let vals = ["0", "7", "-3", "9223372036854775807", "-9223372036854775808", "123456789012345678901234567890"];
        for a in vals {
            for b in vals {
                for c in vals {
                    let (ba, bb, bc): (BigInt, BigInt, BigInt) =
                        (a.parse().unwrap(), b.parse().unwrap(), c.parse().unwrap());
                    let mut m = mixed(a);
                    m.sub_mul(&mixed(b), &mixed(c)).unwrap();
                    assert_eq!(m.to_bigint(), &ba - &bb * &bc);
                    assert_eq!(m.is_zero(), (&ba - &bb * &bc) == BigInt::from(0));
                    let mut m = mixed(a);
                    m.add_assign(&mixed(b)).unwrap();
                    assert_eq!(m.to_bigint(), &ba + &bb);
                    let d = MixedInt::dot(&[mixed(a), mixed(b), mixed(c)], &[mixed(c), mixed(b), mixed(a)]).unwrap();
                    assert_eq!(d.to_bigint(), &ba * &bc * 2 + &bb * &bb);
                }
            }
        }
    }
}
