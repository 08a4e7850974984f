//! Midpoint-radius enclosures over MPFR floats.
//!
//! A [`CertifiedReal`] stands for the closed interval `[mid - rad, mid + rad]`
//! and every operation returns a ball that contains the image of its inputs.
//! Midpoints are rounded to nearest at the working precision; the rounding
//! error of each operation is charged to the radius, which is itself always
//! rounded upward.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::float::{Constant, Round};
use rug::ops::{AssignRound, Pow};
use rug::{Float, Integer};

use crate::error::{Error, Result};

/// Precision of radius computations. Radii are upper bounds, so a short
/// mantissa only costs a relative overestimate of about 2^-64.
pub const RAD_PREC: u32 = 64;

/// Smallest accepted working precision.
pub const MIN_PREC: u32 = 53;

pub(crate) fn up<T>(val: T) -> Float
where
    Float: AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(RAD_PREC, val, Round::Up).0
}

pub(crate) fn down<T>(val: T) -> Float
where
    Float: AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(RAD_PREC, val, Round::Down).0
}

/// Upper bound on the rounding error of a value rounded to nearest:
/// `|x - round(x)| <= ulp/2 <= |round(x)| * 2^-prec`.
fn rounding_error(x: &Float) -> Float {
    let mut e = up(x.abs_ref());
    e >>= x.prec();
    e
}

/// Exact conversion of an `f64` (every double is a 53-bit float).
pub fn exact(x: f64) -> Float {
    Float::with_val(53, x)
}

#[derive(Clone, PartialEq)]
pub struct CertifiedReal {
    mid: Float,
    rad: Float,
}

impl CertifiedReal {
    /// Ball with the given midpoint and radius. The radius must be finite and
    /// nonnegative.
    pub fn new(mid: Float, rad: Float) -> Result<Self> {
        if !mid.is_finite() {
            return Err(Error::precondition("midpoint must be finite"));
        }
        if !rad.is_finite() || rad.is_sign_negative() && !rad.is_zero() {
            return Err(Error::precondition("radius must be finite and nonnegative"));
        }
        Ok(CertifiedReal { mid, rad: up(&rad) })
    }

    /// Radius-zero ball around an exactly representable value.
    pub fn exact(mid: Float) -> Self {
        CertifiedReal {
            mid,
            rad: Float::new(RAD_PREC),
        }
    }

    pub fn zero(prec: u32) -> Self {
        Self::exact(Float::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        Self::exact(Float::with_val(prec, 1))
    }

    pub fn from_f64(x: f64) -> Self {
        Self::exact(exact(x))
    }

    pub fn from_i64(x: i64, prec: u32) -> Self {
        Self::from_integer(&Integer::from(x), prec)
    }

    pub fn from_integer(x: &Integer, prec: u32) -> Self {
        let mid = Float::with_val(prec, x);
        let rad = if Float::with_val(prec, &mid - x).is_zero() {
            Float::new(RAD_PREC)
        } else {
            rounding_error(&mid)
        };
        CertifiedReal { mid, rad }
    }

    /// Ball from a closed interval `[lo, hi]`.
    pub fn from_endpoints(lo: &Float, hi: &Float, prec: u32) -> Result<Self> {
        if lo > hi {
            return Err(Error::precondition("interval endpoints out of order"));
        }
        let mut mid = Float::with_val(prec, lo + hi);
        mid >>= 1;
        let r_hi = up(hi - &mid);
        let r_lo = up(&mid - lo);
        let rad = if r_hi > r_lo { r_hi } else { r_lo };
        Self::new(mid, rad)
    }

    pub fn pi(prec: u32) -> Self {
        let mid = Float::with_val(prec, Constant::Pi);
        let rad = rounding_error(&mid);
        CertifiedReal { mid, rad }
    }

    pub fn mid(&self) -> &Float {
        &self.mid
    }

    pub fn rad(&self) -> &Float {
        &self.rad
    }

    pub fn prec(&self) -> u32 {
        self.mid.prec()
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// Lower endpoint, rounded down.
    pub fn lower(&self) -> Float {
        Float::with_val_round(
            self.prec().max(RAD_PREC),
            &self.mid - &self.rad,
            Round::Down,
        )
        .0
    }

    /// Upper endpoint, rounded up.
    pub fn upper(&self) -> Float {
        Float::with_val_round(self.prec().max(RAD_PREC), &self.mid + &self.rad, Round::Up).0
    }

    /// Lower bound for `|x|` over the ball (zero when the ball meets zero).
    pub fn abs_lower(&self) -> Float {
        let prec = self.prec().max(RAD_PREC);
        let v = Float::with_val_round(prec, self.mid.clone().abs() - &self.rad, Round::Down).0;
        if v.is_sign_negative() {
            Float::new(prec)
        } else {
            v
        }
    }

    /// Upper bound for `|x|` over the ball.
    pub fn abs_upper(&self) -> Float {
        Float::with_val_round(
            self.prec().max(RAD_PREC),
            self.mid.clone().abs() + &self.rad,
            Round::Up,
        )
        .0
    }

    /// Sign of every point of the ball, or `None` when it meets zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.mid > self.rad {
            Some(Ordering::Greater)
        } else if -self.mid.clone() > self.rad {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    pub fn excludes_zero(&self) -> bool {
        self.sign().is_some()
    }

    /// Conservative membership test: may accept points within one rounding of
    /// the boundary, never rejects an enclosed point.
    pub fn contains(&self, x: &Float) -> bool {
        self.lower() <= *x && *x <= self.upper()
    }

    /// Whether the two balls can share a point (conservative, as `contains`).
    pub fn overlaps(&self, other: &CertifiedReal) -> bool {
        let gap = if self.mid >= other.mid {
            down(&self.mid - &other.mid)
        } else {
            down(&other.mid - &self.mid)
        };
        gap <= up(&self.rad + &other.rad)
    }

    /// Widens the radius by `extra`.
    pub fn add_error(&mut self, extra: &Float) {
        debug_assert!(!extra.is_sign_negative() || extra.is_zero());
        self.rad = up(&self.rad + extra);
    }

    /// Rounds the midpoint to `prec` bits, charging the rounding to the radius.
    pub fn with_prec(&self, prec: u32) -> Self {
        let mid = Float::with_val(prec, &self.mid);
        let mut rad = self.rad.clone();
        if mid != self.mid {
            rad = up(&rad + rounding_error(&mid));
        }
        CertifiedReal { mid, rad }
    }

    pub fn abs(&self) -> Self {
        CertifiedReal {
            mid: self.mid.clone().abs(),
            rad: self.rad.clone(),
        }
    }

    fn result_prec(&self, other: &CertifiedReal) -> u32 {
        self.prec().max(other.prec())
    }

    fn add_ref(&self, other: &CertifiedReal) -> Self {
        let mid = Float::with_val(self.result_prec(other), &self.mid + &other.mid);
        let rad = up(up(&self.rad + &other.rad) + rounding_error(&mid));
        CertifiedReal { mid, rad }
    }

    fn sub_ref(&self, other: &CertifiedReal) -> Self {
        let mid = Float::with_val(self.result_prec(other), &self.mid - &other.mid);
        let rad = up(up(&self.rad + &other.rad) + rounding_error(&mid));
        CertifiedReal { mid, rad }
    }

    fn mul_ref(&self, other: &CertifiedReal) -> Self {
        let mid = Float::with_val(self.result_prec(other), &self.mid * &other.mid);
        let a = up(up(self.mid.abs_ref()) * &other.rad);
        let b = up(up(other.mid.abs_ref()) * &self.rad);
        let ab = up(&self.rad * &other.rad);
        let rad = up(up(up(a + b) + ab) + rounding_error(&mid));
        CertifiedReal { mid, rad }
    }

    /// Quotient; fails when the divisor ball meets zero.
    pub fn checked_div(&self, other: &CertifiedReal) -> Result<Self> {
        if !other.excludes_zero() {
            return Err(Error::precondition("divisor interval contains zero"));
        }
        let mid = Float::with_val(self.result_prec(other), &self.mid / &other.mid);
        // |a/b - A/B| <= (|B| ra + |A| rb) / (|B| (|B| - rb))
        let num =
            up(up(up(other.mid.abs_ref()) * &self.rad) + up(up(self.mid.abs_ref()) * &other.rad));
        let b_abs = down(other.mid.abs_ref());
        let den = down(&b_abs * down(&b_abs - &other.rad));
        let rad = up(up(num / den) + rounding_error(&mid));
        Ok(CertifiedReal { mid, rad })
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        let mid = Float::with_val(self.prec(), &self.mid * k);
        let rad = up(up(&self.rad * k.unsigned_abs()) + rounding_error(&mid));
        CertifiedReal { mid, rad }
    }

    pub fn div_u64(&self, k: u64) -> Self {
        assert!(k > 0, "division by zero");
        let mid = Float::with_val(self.prec(), &self.mid / k);
        let rad = up(up(&self.rad / k) + rounding_error(&mid));
        CertifiedReal { mid, rad }
    }

    /// Multiplication by `2^k` (exact on both midpoint and radius).
    pub fn mul_pow2(&self, k: i32) -> Self {
        let mut mid = self.mid.clone();
        let mut rad = self.rad.clone();
        mid <<= k;
        rad <<= k;
        CertifiedReal { mid, rad }
    }

    pub fn square(&self) -> Self {
        self.pow_u(2)
    }

    pub fn pow_u(&self, n: u32) -> Self {
        if n == 0 {
            return Self::one(self.prec());
        }
        let mid = Float::with_val(self.prec(), (&self.mid).pow(n));
        // |(A+e)^n - A^n| <= n r (|A| + r)^(n-1)
        let rad = if self.rad.is_zero() {
            Float::new(RAD_PREC)
        } else {
            let base = up(up(self.mid.abs_ref()) + &self.rad);
            let grow = up((&base).pow(n - 1));
            up(up(&self.rad * n) * grow)
        };
        let rad = up(rad + rounding_error(&mid));
        CertifiedReal { mid, rad }
    }

    pub fn sqrt(&self) -> Result<Self> {
        let reaches_below_zero = if self.rad.is_zero() {
            self.mid.is_sign_negative() && !self.mid.is_zero()
        } else {
            self.sign() != Some(Ordering::Greater) || self.lower().is_sign_negative()
        };
        if reaches_below_zero {
            return Err(Error::precondition(
                "square root of an interval reaching below zero",
            ));
        }
        let mid = Float::with_val(self.prec(), self.mid.sqrt_ref());
        let mut rad = rounding_error(&mid);
        if !self.rad.is_zero() {
            // sqrt(A) - sqrt(A - r) <= r / sqrt(A)
            let s = down(self.mid.sqrt_ref());
            rad = up(rad + up(&self.rad / s));
        }
        Ok(CertifiedReal { mid, rad })
    }

    pub fn exp(&self) -> Self {
        let mid = Float::with_val(self.prec(), self.mid.exp_ref());
        let mut rad = rounding_error(&mid);
        if !self.rad.is_zero() {
            // |e^(A+e) - e^A| <= e^A (e^r - 1)
            let scale = up(self.mid.exp_ref());
            rad = up(rad + up(scale * up(self.rad.exp_m1_ref())));
        }
        CertifiedReal { mid, rad }
    }

    pub fn ln(&self) -> Result<Self> {
        if self.sign() != Some(Ordering::Greater) {
            return Err(Error::precondition(
                "logarithm of an interval meeting (-inf, 0]",
            ));
        }
        let mid = Float::with_val(self.prec(), self.mid.ln_ref());
        let mut rad = rounding_error(&mid);
        if !self.rad.is_zero() {
            // |ln(A+e) - ln A| <= r / (A - r)
            rad = up(rad + up(&self.rad / down(&self.mid - &self.rad)));
        }
        Ok(CertifiedReal { mid, rad })
    }

    pub fn cos(&self) -> Self {
        let mid = Float::with_val(self.prec(), self.mid.cos_ref());
        let rad = up(&self.rad + rounding_error(&mid));
        CertifiedReal { mid, rad }
    }
}

impl fmt::Debug for CertifiedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CertifiedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(17);
        write!(
            f,
            "{} ± {}",
            self.mid.to_string_radix(10, Some(digits)),
            format_radius(&self.rad)
        )
    }
}

/// Radius rendered with three significant digits, rounded up.
pub fn format_radius(rad: &Float) -> String {
    if rad.is_zero() {
        return "0".to_string();
    }
    let r = Float::with_val_round(12, rad, Round::Up).0;
    format!("{:.3e}", r)
}

macro_rules! forward_binop {
    ($Trait:ident, $method:ident, $inner:ident) => {
        impl $Trait<&CertifiedReal> for &CertifiedReal {
            type Output = CertifiedReal;
            fn $method(self, rhs: &CertifiedReal) -> CertifiedReal {
                self.$inner(rhs)
            }
        }
        impl $Trait<CertifiedReal> for CertifiedReal {
            type Output = CertifiedReal;
            fn $method(self, rhs: CertifiedReal) -> CertifiedReal {
                (&self).$inner(&rhs)
            }
        }
        impl $Trait<&CertifiedReal> for CertifiedReal {
            type Output = CertifiedReal;
            fn $method(self, rhs: &CertifiedReal) -> CertifiedReal {
                (&self).$inner(rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

impl Neg for CertifiedReal {
    type Output = CertifiedReal;
    fn neg(self) -> CertifiedReal {
        CertifiedReal {
            mid: -self.mid,
            rad: self.rad,
        }
    }
}

impl Neg for &CertifiedReal {
    type Output = CertifiedReal;
    fn neg(self) -> CertifiedReal {
        -self.clone()
    }
}
