//! Floating-point back-ends for the Gram–Schmidt data.
//!
//! Two kinds are provided: plain hardware `f64`, and [`ExtFloat`], a 53-bit
//! mantissa paired with a wide binary exponent. The latter has the precision of
//! a double but never overflows on the squared norms of bases with
//! thousand-bit entries (the random HNF instances at dimension 100 and above).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{FromPrimitive, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Which floating-point type carries the Gram–Schmidt data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum FloatKind {
    /// Pick `HardwareDouble` when every squared row norm fits comfortably in
    /// the `f64` exponent range, `ExtendedOrEmulated` otherwise.
    #[default]
    Auto,
    HardwareDouble,
    ExtendedOrEmulated,
}

impl FloatKind {
    /// Reads `POTLLL_FLOAT` (`double`, `extended` or `auto`).
    pub fn from_env() -> Option<FloatKind> {
        let value = std::env::var("POTLLL_FLOAT").ok()?;
        value.parse().ok()
    }
}

impl std::str::FromStr for FloatKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "auto" => Ok(FloatKind::Auto),
            "double" | "f64" | "hardware" => Ok(FloatKind::HardwareDouble),
            "extended" | "ext" | "emulated" => Ok(FloatKind::ExtendedOrEmulated),
            other => Err(format!("unknown float kind `{other}`")),
        }
    }
}

/// Squared norms above `2^MAX_DOUBLE_LOG2` are handled in extended mode.
/// Every intermediate of the Gram-based orthogonalization is bounded by the
/// largest squared row norm, so this leaves ample headroom below `2^1024`.
pub const MAX_DOUBLE_LOG2: f64 = 960.0;

/// Numeric contract of the Gram–Schmidt engine.
pub trait GsoFloat:
    Copy
    + fmt::Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Send
    + Sync
    + 'static
{
    const KIND: FloatKind;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    fn from_bigint(x: &BigInt) -> Self;
    /// Lossy conversion; saturates to `±inf` outside the `f64` range.
    fn to_f64(self) -> f64;
    /// Natural logarithm of a positive value.
    fn ln(self) -> f64;
    fn abs(self) -> Self;
    fn is_finite(self) -> bool;
    fn is_zero(self) -> bool;
    /// Nearest integer, ties away from zero.
    fn round_to_bigint(self) -> BigInt;
    /// Scales by `2^k`.
    fn mul_pow2(self, k: i32) -> Self;
    /// `self -= a * b`
    #[inline]
    fn sub_mul(&mut self, a: Self, b: Self) {
        *self -= a * b;
    }
}

fn f64_to_bigint(x: f64) -> BigInt {
    BigInt::from_f64(x).unwrap_or_else(BigInt::zero)
}

impl GsoFloat for f64 {
    const KIND: FloatKind = FloatKind::HardwareDouble;

    #[inline]
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn one() -> Self {
        1.0
    }
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn from_bigint(x: &BigInt) -> Self {
        x.to_f64().unwrap_or(f64::NAN)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn ln(self) -> f64 {
        f64::ln(self)
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    #[inline]
    fn is_zero(self) -> bool {
        self == 0.0
    }
    #[inline]
    fn round_to_bigint(self) -> BigInt {
        f64_to_bigint(self.round())
    }
    #[inline]
    fn mul_pow2(self, k: i32) -> Self {
        libm::ldexp(self, k)
    }
}

/// A double-precision mantissa with an `i32` binary exponent.
///
/// The value is `mant * 2^exp` with `0.5 <= |mant| < 1`, or `mant == 0`
/// (in which case `exp == 0`).
#[derive(Clone, Copy)]
pub struct ExtFloat {
    mant: f64,
    exp: i32,
}

impl ExtFloat {
    pub const ZERO: ExtFloat = ExtFloat { mant: 0.0, exp: 0 };

    #[inline]
    fn normalized(mant: f64, exp: i32) -> ExtFloat {
        if mant == 0.0 || !mant.is_finite() {
            return ExtFloat { mant, exp: if mant == 0.0 { 0 } else { exp } };
        }
        let bits = mant.to_bits();
        let biased = ((bits >> 52) & 0x7ff) as i32;
        if biased == 0 {
            let (m, e) = libm::frexp(mant);
            return ExtFloat { mant: m, exp: exp + e };
        }
        // swap the exponent field for that of [0.5, 1)
        let m = f64::from_bits((bits & !(0x7ff << 52)) | (1022 << 52));
        ExtFloat { mant: m, exp: exp + biased - 1022 }
    }

    pub fn mantissa(self) -> f64 {
        self.mant
    }

    pub fn exponent(self) -> i32 {
        self.exp
    }

    /// Base-2 logarithm of the absolute value.
    pub fn log2(self) -> f64 {
        self.mant.abs().log2() + self.exp as f64
    }
}

impl fmt::Debug for ExtFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mant, self.exp)
    }
}

impl fmt::Display for ExtFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_f64();
        if v.is_finite() && v != 0.0 || self.mant == 0.0 {
            write!(f, "{v}")
        } else {
            write!(f, "{:?}", self)
        }
    }
}

impl PartialEq for ExtFloat {
    fn eq(&self, other: &Self) -> bool {
        self.mant == other.mant && (self.exp == other.exp || self.mant == 0.0)
    }
}

impl PartialOrd for ExtFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        (*self - *other).mant.partial_cmp(&0.0)
    }
}

/// `2^-d` for `0 <= d <= 60`.
#[inline]
fn pow2_neg(d: i32) -> f64 {
    f64::from_bits(((1023 - d) as u64) << 52)
}

impl Add for ExtFloat {
    type Output = ExtFloat;

    #[inline]
    fn add(self, rhs: ExtFloat) -> ExtFloat {
        if rhs.mant == 0.0 {
            return self;
        }
        if self.mant == 0.0 {
            return rhs;
        }
        let d = self.exp - rhs.exp;
        if d > 60 {
            self
        } else if d < -60 {
            rhs
        } else if d >= 0 {
            ExtFloat::normalized(self.mant + rhs.mant * pow2_neg(d), self.exp)
        } else {
            ExtFloat::normalized(self.mant * pow2_neg(-d) + rhs.mant, rhs.exp)
        }
    }
}

impl Neg for ExtFloat {
    type Output = ExtFloat;

    #[inline]
    fn neg(self) -> ExtFloat {
        ExtFloat { mant: -self.mant, exp: self.exp }
    }
}

impl Sub for ExtFloat {
    type Output = ExtFloat;

    #[inline]
    fn sub(self, rhs: ExtFloat) -> ExtFloat {
        self + (-rhs)
    }
}

impl Mul for ExtFloat {
    type Output = ExtFloat;

    #[inline]
    fn mul(self, rhs: ExtFloat) -> ExtFloat {
        ExtFloat::normalized(self.mant * rhs.mant, self.exp + rhs.exp)
    }
}

impl Div for ExtFloat {
    type Output = ExtFloat;

    #[inline]
    fn div(self, rhs: ExtFloat) -> ExtFloat {
        ExtFloat::normalized(self.mant / rhs.mant, self.exp - rhs.exp)
    }
}

impl AddAssign for ExtFloat {
    #[inline]
    fn add_assign(&mut self, rhs: ExtFloat) {
        *self = *self + rhs;
    }
}

impl SubAssign for ExtFloat {
    #[inline]
    fn sub_assign(&mut self, rhs: ExtFloat) {
        *self = *self - rhs;
    }
}

impl MulAssign for ExtFloat {
    #[inline]
    fn mul_assign(&mut self, rhs: ExtFloat) {
        *self = *self * rhs;
    }
}

impl GsoFloat for ExtFloat {
    const KIND: FloatKind = FloatKind::ExtendedOrEmulated;

    #[inline]
    fn zero() -> Self {
        ExtFloat::ZERO
    }
    #[inline]
    fn one() -> Self {
        ExtFloat { mant: 0.5, exp: 1 }
    }
    #[inline]
    fn from_f64(x: f64) -> Self {
        ExtFloat::normalized(x, 0)
    }

    fn from_bigint(x: &BigInt) -> Self {
        let bits = x.bits();
        if bits <= 1000 {
            return ExtFloat::from_f64(x.to_f64().unwrap_or(0.0));
        }
        let shift = bits - 64;
        let top = (x >> shift).to_f64().unwrap_or(0.0);
        ExtFloat::normalized(top, shift as i32)
    }

    #[inline]
    fn to_f64(self) -> f64 {
        libm::ldexp(self.mant, self.exp)
    }
    #[inline]
    fn ln(self) -> f64 {
        self.mant.ln() + self.exp as f64 * std::f64::consts::LN_2
    }
    #[inline]
    fn abs(self) -> Self {
        ExtFloat { mant: self.mant.abs(), exp: self.exp }
    }
    #[inline]
    fn is_finite(self) -> bool {
        self.mant.is_finite()
    }
    #[inline]
    fn is_zero(self) -> bool {
        self.mant == 0.0
    }

    fn round_to_bigint(self) -> BigInt {
        if self.exp <= 53 {
            return f64_to_bigint(self.to_f64().round());
        }
        // Already integral; the mantissa holds 53 significant bits.
        let scaled = libm::ldexp(self.mant, 53) as i64;
        BigInt::from(scaled) << (self.exp - 53) as usize
    }

    #[inline]
    fn mul_pow2(self, k: i32) -> Self {
        if self.mant == 0.0 {
            self
        } else {
            ExtFloat { mant: self.mant, exp: self.exp + k }
        }
    }

    /// The product is left unnormalized (`0.25 <= |p| < 1`) before the
    /// subtraction.
    #[inline]
    fn sub_mul(&mut self, a: Self, b: Self) {
        let p = a.mant * b.mant;
        if p == 0.0 {
            return;
        }
        let pe = a.exp + b.exp;
        if self.mant == 0.0 {
            *self = ExtFloat::normalized(-p, pe);
            return;
        }
        let d = self.exp - pe;
        *self = if d > 60 {
            *self
        } else if d < -60 {
            ExtFloat::normalized(-p, pe)
        } else if d >= 0 {
            ExtFloat::normalized(self.mant - p * pow2_neg(d), self.exp)
        } else {
            ExtFloat::normalized(self.mant * pow2_neg(-d) - p, pe)
        };
    }
}
