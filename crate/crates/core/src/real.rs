//! Scalar abstraction shared by the cocycle and certification kernels.
//!
//! `f64` is the fast path. [`BigReal`] wraps an MPFR float whose precision is
//! carried by each value, so kernels written against [`Real`] run unchanged at
//! any bit width.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Round;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

/// Working precision selected for a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Precision {
    Double,
    /// Quad-like width, realised as a 113-bit MPFR float.
    Extended,
    BigFloat(u32),
}

impl Precision {
    pub fn bits(self) -> u32 {
        match self {
            Precision::Double => 53,
            Precision::Extended => 113,
            Precision::BigFloat(b) => b,
        }
    }

    pub fn unit_roundoff(self) -> f64 {
        (-(self.bits() as f64)).exp2()
    }

    /// Parses `double`, `extended` or `big-float:<bits>`.
    pub fn parse(s: &str) -> Result<Precision, String> {
        match s {
            "double" => Ok(Precision::Double),
            "extended" => Ok(Precision::Extended),
            _ => {
                let bits = s
                    .strip_prefix("big-float:")
                    .or_else(|| s.strip_prefix("bigfloat:"))
                    .ok_or_else(|| format!("unknown precision `{s}`"))?;
                let bits: u32 = bits.parse().map_err(|_| format!("bad bit count in `{s}`"))?;
                if !(24..=1 << 20).contains(&bits) {
                    return Err(format!("bit count {bits} out of range"));
                }
                Ok(Precision::BigFloat(bits))
            }
        }
    }

    pub fn label(self) -> String {
        match self {
            Precision::Double => "double".into(),
            Precision::Extended => "extended".into(),
            Precision::BigFloat(b) => format!("big-float:{b}"),
        }
    }
}

pub trait Real:
    Clone
    + Debug
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn with_bits(x: f64, bits: u32) -> Self;
    fn from_rational(r: &Rational, bits: u32) -> Self;
    /// A constant at the same precision as `self`.
    fn lit(&self, x: f64) -> Self;
    fn bits(&self) -> u32;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    /// cos(2πx), with x reduced mod 1 first.
    fn cos_2pi(&self) -> Self;
    /// sin(2πx), with x reduced mod 1 first.
    fn sin_2pi(&self) -> Self;
    fn atan2(&self, x: &Self) -> Self;
    fn floor(&self) -> Self;
    fn hypot(&self, other: &Self) -> Self;
    /// Splits into mantissa in [0.5, 1) and binary exponent; zero maps to (0, 0).
    fn frexp(&self) -> (Self, i64);
    fn ldexp(&self, e: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn is_finite(&self) -> bool;

    fn zero_like(&self) -> Self {
        self.lit(0.0)
    }
    fn one_like(&self) -> Self {
        self.lit(1.0)
    }
    fn eps(&self) -> f64 {
        (-(self.bits() as f64)).exp2()
    }
    /// self·a − b.
    fn mul_sub(&self, a: &Self, b: &Self) -> Self {
        self.clone() * a.clone() - b.clone()
    }
    /// self += x².
    fn add_square(&mut self, x: &Self) {
        *self = self.clone() + x.clone() * x.clone();
    }
    /// x - round(x), in [-1/2, 1/2].
    fn frac_centered(&self) -> Self {
        let h = self.lit(0.5);
        let r = (self.clone() + h).floor();
        self.clone() - r
    }
    /// Decimal rendering that parses back to the same value.
    fn to_decimal(&self) -> String {
        format!("{:e}", self.to_f64())
    }
}

impl Real for f64 {
    fn with_bits(x: f64, _bits: u32) -> Self {
        x
    }
    fn from_rational(r: &Rational, _bits: u32) -> Self {
        r.to_f64()
    }
    fn lit(&self, x: f64) -> Self {
        x
    }
    fn bits(&self) -> u32 {
        53
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn cos_2pi(&self) -> Self {
        let r = *self - self.round();
        (std::f64::consts::TAU * r).cos()
    }
    fn sin_2pi(&self) -> Self {
        let r = *self - self.round();
        (std::f64::consts::TAU * r).sin()
    }
    fn atan2(&self, x: &Self) -> Self {
        f64::atan2(*self, *x)
    }
    fn floor(&self) -> Self {
        f64::floor(*self)
    }
    fn hypot(&self, other: &Self) -> Self {
        f64::hypot(*self, *other)
    }
    fn frexp(&self) -> (Self, i64) {
        frexp_f64(*self)
    }
    fn ldexp(&self, e: i64) -> Self {
        ldexp_f64(*self, e)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

pub fn frexp_f64(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    if exp == 0 {
        // subnormal: lift into the normal range first
        let (m, e) = frexp_f64(x * 2f64.powi(64));
        return (m, e - 64);
    }
    let m = f64::from_bits((bits & !(0x7ff << 52)) | (1022 << 52));
    (m, exp - 1022)
}

pub fn ldexp_f64(mut x: f64, mut e: i64) -> f64 {
    // step in chunks so intermediate powers stay representable
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

/// MPFR-backed real; precision travels with the value.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct BigReal(pub Float);

impl BigReal {
    pub fn new(x: f64, bits: u32) -> Self {
        BigReal(Float::with_val(bits, x))
    }
    pub fn inner(&self) -> &Float {
        &self.0
    }
}

impl Add for BigReal {
    type Output = BigReal;
    fn add(self, o: BigReal) -> BigReal {
        BigReal(self.0 + o.0)
    }
}
impl Sub for BigReal {
    type Output = BigReal;
    fn sub(self, o: BigReal) -> BigReal {
        BigReal(self.0 - o.0)
    }
}
impl Mul for BigReal {
    type Output = BigReal;
    fn mul(self, o: BigReal) -> BigReal {
        BigReal(self.0 * o.0)
    }
}
impl Div for BigReal {
    type Output = BigReal;
    fn div(self, o: BigReal) -> BigReal {
        BigReal(self.0 / o.0)
    }
}
impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(-self.0)
    }
}

impl Real for BigReal {
    fn with_bits(x: f64, bits: u32) -> Self {
        BigReal(Float::with_val(bits, x))
    }
    fn from_rational(r: &Rational, bits: u32) -> Self {
        BigReal(Float::with_val(bits, r))
    }
    fn lit(&self, x: f64) -> Self {
        BigReal(Float::with_val(self.0.prec(), x))
    }
    fn bits(&self) -> u32 {
        self.0.prec()
    }
    fn mul_sub(&self, a: &Self, b: &Self) -> Self {
        let mut r = Float::with_val(self.0.prec(), &self.0 * &a.0);
        r -= &b.0;
        BigReal(r)
    }
    fn add_square(&mut self, x: &Self) {
        let s = Float::with_val(self.0.prec(), x.0.square_ref());
        self.0 += &s;
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    fn abs(&self) -> Self {
        BigReal(self.0.clone().abs())
    }
    fn sqrt(&self) -> Self {
        BigReal(self.0.clone().sqrt())
    }
    fn ln(&self) -> Self {
        BigReal(self.0.clone().ln())
    }
    fn exp(&self) -> Self {
        BigReal(self.0.clone().exp())
    }
    fn cos_2pi(&self) -> Self {
        BigReal(self.frac_centered().0.cos_u(1))
    }
    fn sin_2pi(&self) -> Self {
        BigReal(self.frac_centered().0.sin_u(1))
    }
    fn atan2(&self, x: &Self) -> Self {
        BigReal(self.0.clone().atan2(&x.0))
    }
    fn floor(&self) -> Self {
        BigReal(self.0.clone().floor())
    }
    fn hypot(&self, other: &Self) -> Self {
        BigReal(self.0.clone().hypot(&other.0))
    }
    fn frexp(&self) -> (Self, i64) {
        match self.0.get_exp() {
            None => (self.clone(), 0),
            Some(e) => {
                let m = self.0.clone() >> e;
                (BigReal(m), e as i64)
            }
        }
    }
    fn ldexp(&self, e: i64) -> Self {
        let e = e.clamp(i32::MIN as i64, i32::MAX as i64) as i32;
        BigReal(self.0.clone() << e)
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn to_decimal(&self) -> String {
        self.0.to_string_radix(10, None)
    }
    fn is_finite(&self) -> bool {
        self.0.is_finite()
    }
}

/// Lower and upper MPFR bounds on e^x for an exactly representable x.
pub fn exp_bounds(x: &Float, bits: u32) -> (Float, Float) {
    let (lo, _) = Float::with_val_round(bits, x.exp_ref(), Round::Down);
    let (hi, _) = Float::with_val_round(bits, x.exp_ref(), Round::Up);
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frexp_roundtrip() {
        for &x in &[1.0, -3.5, 1e-310, 6.02e23, 0.75] {
            let (m, e) = frexp_f64(x);
            assert!((0.5..1.0).contains(&m.abs()), "{x}");
            assert_eq!(ldexp_f64(m, e), x);
        }
        let b = BigReal::new(-12.0, 200);
        let (m, e) = b.frexp();
        assert_eq!(m.to_f64(), -0.75);
        assert_eq!(e, 4);
    }

    #[test]
    fn precision_parsing() {
        assert_eq!(Precision::parse("double"), Ok(Precision::Double));
        assert_eq!(Precision::parse("big-float:256"), Ok(Precision::BigFloat(256)));
        assert_eq!(Precision::Extended.bits(), 113);
        assert!(Precision::parse("quad").is_err());
        assert!(Precision::parse("big-float:3").is_err());
    }

    #[test]
    fn cos_reduction_matches_across_widths() {
        let x = 12345.2;
        let a = x.cos_2pi();
        let b = BigReal::new(x, 300).cos_2pi().to_f64();
        assert!((a - b).abs() < 1e-11);
        assert!(BigReal::new(0.25, 128).cos_2pi().0.is_zero());
    }

    #[test]
    fn exp_bracket_contains_e() {
        let x = Float::with_val(64, 1);
        let (lo, hi) = exp_bounds(&x, 100);
        assert!(lo < hi);
        assert!(lo.to_f64() <= std::f64::consts::E && hi.to_f64() >= std::f64::consts::E);
    }
}
