//! Scalar and complex arithmetic used throughout the crate.
//!
//! Everything geometric is generic over [`Real`], which has two
//! implementations: plain `f64` for construction checks and plotting, and
//! [`Mp`], an MPFR-backed float whose working precision is a process-wide
//! setting (see [`set_mp_precision`]).

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU32, Ordering};

use rug::float::Constant;
use rug::Float;

/// Default precision, in bits, of [`Mp`] values.
pub const DEFAULT_MP_PRECISION: u32 = 256;

static MP_PRECISION: AtomicU32 = AtomicU32::new(DEFAULT_MP_PRECISION);

/// Sets the precision used for every [`Mp`] created afterwards.
///
/// Values created before the call keep their precision; mixing precisions
/// in one computation is allowed but wastes the extra bits.
pub fn set_mp_precision(bits: u32) {
    MP_PRECISION.store(bits.max(64), Ordering::Relaxed);
}

/// Current [`Mp`] precision in bits.
pub fn mp_precision() -> u32 {
    MP_PRECISION.load(Ordering::Relaxed)
}

pub trait Real:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn pi() -> Self;
    fn sqrt(&self) -> Self;
    fn sin_cos(&self) -> (Self, Self);
    /// Four-quadrant arctangent of `self / x`.
    fn atan2(&self, x: &Self) -> Self;
    fn abs(&self) -> Self;
    fn floor(&self) -> Self;
    fn is_finite(&self) -> bool;
    /// Mantissa bits of this scalar type (at the current setting for `Mp`).
    fn precision_bits() -> u32;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn from_i64(x: i64) -> Self {
        Self::from_f64(x as f64)
    }

    fn tau() -> Self {
        Self::pi() * Self::from_f64(2.0)
    }

    fn sqr(&self) -> Self {
        self.clone() * self.clone()
    }

    fn cos(&self) -> Self {
        self.sin_cos().1
    }

    fn sin(&self) -> Self {
        self.sin_cos().0
    }

    /// Representative of `self` modulo 2π in `[0, 2π)`.
    fn rem_tau(&self) -> Self {
        let tau = Self::tau();
        let q = (self.clone() / tau.clone()).floor();
        let mut r = self.clone() - q * tau.clone();
        // guard against rounding pushing r to exactly 2π or slightly below 0
        if r >= tau {
            r = r - tau;
        } else if r < Self::zero() {
            r = r + tau;
        }
        r
    }

    /// Smallest tolerance that is still meaningful at this precision,
    /// `2^(-bits/2)`.
    fn half_precision_eps() -> f64 {
        2f64.powf(-(Self::precision_bits() as f64) / 2.0)
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn sin_cos(&self) -> (Self, Self) {
        f64::sin_cos(*self)
    }
    fn atan2(&self, x: &Self) -> Self {
        f64::atan2(*self, *x)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn floor(&self) -> Self {
        f64::floor(*self)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn precision_bits() -> u32 {
        53
    }
}

/// Extended-precision real backed by MPFR.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Mp(pub Float);

impl Mp {
    pub fn new(x: f64) -> Self {
        Mp(Float::with_val(mp_precision(), x))
    }

    pub fn inner(&self) -> &Float {
        &self.0
    }
}

impl fmt::Debug for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mp({})", self.0.to_f64())
    }
}

impl fmt::Display for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl Add for Mp {
    type Output = Mp;
    fn add(self, rhs: Mp) -> Mp {
        Mp(self.0 + rhs.0)
    }
}

impl Sub for Mp {
    type Output = Mp;
    fn sub(self, rhs: Mp) -> Mp {
        Mp(self.0 - rhs.0)
    }
}

impl Mul for Mp {
    type Output = Mp;
    fn mul(self, rhs: Mp) -> Mp {
        Mp(self.0 * rhs.0)
    }
}

impl Div for Mp {
    type Output = Mp;
    fn div(self, rhs: Mp) -> Mp {
        Mp(self.0 / rhs.0)
    }
}

impl Neg for Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        Mp(-self.0)
    }
}

impl Real for Mp {
    fn from_f64(x: f64) -> Self {
        Mp::new(x)
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    fn pi() -> Self {
        Mp(Float::with_val(mp_precision(), Constant::Pi))
    }
    fn sqrt(&self) -> Self {
        Mp(self.0.clone().sqrt())
    }
    fn sin_cos(&self) -> (Self, Self) {
        let (s, c) = self.0.clone().sin_cos(Float::new(self.0.prec()));
        (Mp(s), Mp(c))
    }
    fn atan2(&self, x: &Self) -> Self {
        Mp(self.0.clone().atan2(&x.0))
    }
    fn abs(&self) -> Self {
        Mp(self.0.clone().abs())
    }
    fn floor(&self) -> Self {
        Mp(self.0.clone().floor())
    }
    fn is_finite(&self) -> bool {
        self.0.is_finite()
    }
    fn precision_bits() -> u32 {
        mp_precision()
    }
}

/// Minimal complex number over a [`Real`] scalar.
#[derive(Clone, Debug, PartialEq)]
pub struct Cx<R> {
    pub re: R,
    pub im: R,
}

impl<R: Real> Cx<R> {
    pub fn new(re: R, im: R) -> Self {
        Cx { re, im }
    }

    pub fn zero() -> Self {
        Cx::new(R::zero(), R::zero())
    }

    pub fn one() -> Self {
        Cx::new(R::one(), R::zero())
    }

    pub fn from_f64(re: f64, im: f64) -> Self {
        Cx::new(R::from_f64(re), R::from_f64(im))
    }

    /// `e^{iθ}`.
    pub fn unit(theta: &R) -> Self {
        let (s, c) = theta.sin_cos();
        Cx::new(c, s)
    }

    pub fn conj(&self) -> Self {
        Cx::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> R {
        self.re.sqr() + self.im.sqr()
    }

    pub fn abs(&self) -> R {
        self.norm_sqr().sqrt()
    }

    pub fn arg(&self) -> R {
        self.im.atan2(&self.re)
    }

    pub fn scale(&self, k: &R) -> Self {
        Cx::new(self.re.clone() * k.clone(), self.im.clone() * k.clone())
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        Cx::new(self.re.clone() / n.clone(), -self.im.clone() / n)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn convert<S: Real>(&self) -> Cx<S> {
        Cx::new(S::from_f64(self.re.to_f64()), S::from_f64(self.im.to_f64()))
    }
}

impl<R: Real> Add for Cx<R> {
    type Output = Cx<R>;
    fn add(self, rhs: Cx<R>) -> Cx<R> {
        Cx::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl<R: Real> Sub for Cx<R> {
    type Output = Cx<R>;
    fn sub(self, rhs: Cx<R>) -> Cx<R> {
        Cx::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl<R: Real> Mul for Cx<R> {
    type Output = Cx<R>;
    fn mul(self, rhs: Cx<R>) -> Cx<R> {
        let re = self.re.clone() * rhs.re.clone() - self.im.clone() * rhs.im.clone();
        let im = self.re * rhs.im + self.im * rhs.re;
        Cx::new(re, im)
    }
}

impl<R: Real> Div for Cx<R> {
    type Output = Cx<R>;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Cx<R>) -> Cx<R> {
        self * rhs.recip()
    }
}

impl<R: Real> Neg for Cx<R> {
    type Output = Cx<R>;
    fn neg(self) -> Cx<R> {
        Cx::new(-self.re, -self.im)
    }
}
