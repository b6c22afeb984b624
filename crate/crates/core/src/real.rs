//! Arbitrary-precision floating point on top of `astro-float`.
//!
//! Every operation goes through a `Ctx` that fixes the working precision
//! (default 50 decimal digits) and round-to-nearest; the geometry below has
//! features at scale `e^3`, so double precision would be marginal for the
//! 1e-10 .. 1e-12 tolerances used by the dynamics layer.

use std::cell::RefCell;
use std::cmp::Ordering;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num::ToPrimitive;

use crate::scalar::Scalar;

pub const DEFAULT_DIGITS: usize = 50;

/// One arbitrary-precision real value.
#[derive(Clone, Debug)]
pub struct Real(BigFloat);

pub struct Ctx {
    digits: usize,
    bits: usize,
    rm: RoundingMode,
    consts: RefCell<Consts>,
}

impl Ctx {
    pub fn new(digits: usize) -> Self {
        let digits = digits.max(30);
        // ~3.33 bits per decimal digit plus guard bits.
        let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 64;
        Ctx {
            digits,
            bits,
            rm: RoundingMode::ToEven,
            consts: RefCell::new(Consts::new().expect("constants cache")),
        }
    }

    pub fn digits(&self) -> usize {
        self.digits
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn zero(&self) -> Real {
        self.from_i64(0)
    }

    pub fn one(&self) -> Real {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Real {
        Real(BigFloat::from_i64(n, self.bits))
    }

    pub fn from_f64(&self, x: f64) -> Real {
        Real(BigFloat::from_f64(x, self.bits))
    }

    pub fn from_scalar(&self, s: &Scalar) -> Real {
        let mut cc = self.consts.borrow_mut();
        let num = BigFloat::parse(&s.numer().to_string(), Radix::Dec, self.bits, self.rm, &mut cc);
        let den = BigFloat::parse(&s.denom().to_string(), Radix::Dec, self.bits, self.rm, &mut cc);
        Real(num.div(&den, self.bits, self.rm))
    }

    pub fn add(&self, a: &Real, b: &Real) -> Real {
        Real(a.0.add(&b.0, self.bits, self.rm))
    }

    pub fn sub(&self, a: &Real, b: &Real) -> Real {
        Real(a.0.sub(&b.0, self.bits, self.rm))
    }

    pub fn mul(&self, a: &Real, b: &Real) -> Real {
        Real(a.0.mul(&b.0, self.bits, self.rm))
    }

    pub fn div(&self, a: &Real, b: &Real) -> Real {
        Real(a.0.div(&b.0, self.bits, self.rm))
    }

    pub fn neg(&self, a: &Real) -> Real {
        Real(a.0.neg())
    }

    pub fn abs(&self, a: &Real) -> Real {
        Real(a.0.abs())
    }

    pub fn sqrt(&self, a: &Real) -> Real {
        Real(a.0.sqrt(self.bits, self.rm))
    }

    pub fn powi(&self, a: &Real, mut k: u32) -> Real {
        let mut base = a.clone();
        let mut acc = self.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    pub fn pi(&self) -> Real {
        let mut cc = self.consts.borrow_mut();
        Real(cc.pi(self.bits, self.rm))
    }

    pub fn sin(&self, a: &Real) -> Real {
        let mut cc = self.consts.borrow_mut();
        Real(a.0.sin(self.bits, self.rm, &mut cc))
    }

    pub fn cos(&self, a: &Real) -> Real {
        let mut cc = self.consts.borrow_mut();
        Real(a.0.cos(self.bits, self.rm, &mut cc))
    }

    fn atan(&self, a: &Real) -> Real {
        let mut cc = self.consts.borrow_mut();
        Real(a.0.atan(self.bits, self.rm, &mut cc))
    }

    /// Quadrant-correct arctangent of `y/x`; returns 0 at the origin.
    pub fn atan2(&self, y: &Real, x: &Real) -> Real {
        let sx = self.signum(x);
        let sy = self.signum(y);
        if sx == 0 && sy == 0 {
            return self.zero();
        }
        if sx > 0 {
            return self.atan(&self.div(y, x));
        }
        let pi = self.pi();
        if sx < 0 {
            let base = self.atan(&self.div(y, x));
            return if sy >= 0 {
                self.add(&base, &pi)
            } else {
                self.sub(&base, &pi)
            };
        }
        // x == 0
        let half = self.div(&pi, &self.from_i64(2));
        if sy > 0 {
            half
        } else {
            self.neg(&half)
        }
    }

    pub fn cmp(&self, a: &Real, b: &Real) -> Ordering {
        a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal)
    }

    pub fn signum(&self, a: &Real) -> i32 {
        if a.0.is_zero() {
            return 0;
        }
        match a.0.sign() {
            Some(astro_float::Sign::Pos) => 1,
            Some(astro_float::Sign::Neg) => -1,
            None => 0,
        }
    }

    pub fn lt(&self, a: &Real, b: &Real) -> bool {
        self.cmp(a, b) == Ordering::Less
    }

    pub fn le(&self, a: &Real, b: &Real) -> bool {
        self.cmp(a, b) != Ordering::Greater
    }

    pub fn max(&self, a: &Real, b: &Real) -> Real {
        if self.lt(a, b) {
            b.clone()
        } else {
            a.clone()
        }
    }

    pub fn to_f64(&self, a: &Real) -> f64 {
        if a.0.is_zero() {
            return 0.0;
        }
        let mut cc = self.consts.borrow_mut();
        let s = match a.0.format(Radix::Dec, self.rm, &mut cc) {
            Ok(s) => s,
            Err(_) => return f64::NAN,
        };
        s.parse::<f64>().unwrap_or(f64::NAN)
    }

    pub fn to_string(&self, a: &Real) -> String {
        let mut cc = self.consts.borrow_mut();
        a.0.format(Radix::Dec, self.rm, &mut cc)
            .unwrap_or_else(|_| "NaN".to_string())
    }

    /// Decimal string truncated to `digits` significant digits.
    pub fn to_decimal(&self, a: &Real, digits: usize) -> String {
        let full = self.to_string(a);
        round_decimal(&full, digits)
    }
}

/// Rounds a string like `-1.23456e-3` to a given number of significant digits
/// (truncation; used for display only).
fn round_decimal(s: &str, digits: usize) -> String {
    let (mant, exp) = match s.split_once('e') {
        Some((m, e)) => (m, e),
        None => (s, "+0"),
    };
    let neg = mant.starts_with('-');
    let body: String = mant.trim_start_matches('-').chars().filter(|c| *c != '.').collect();
    let dot = mant
        .trim_start_matches('-')
        .find('.')
        .unwrap_or(mant.trim_start_matches('-').len());
    let kept: String = body.chars().take(digits).collect();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if kept.len() > dot {
        out.push_str(&kept[..dot]);
        out.push('.');
        out.push_str(&kept[dot..]);
    } else {
        out.push_str(&kept);
    }
    out.push('e');
    out.push_str(exp);
    out
}

impl Real {
    pub fn raw(&self) -> &BigFloat {
        &self.0
    }
}

/// Convert a scalar straight to f64 (through num's conversion).
pub fn scalar_to_f64(s: &Scalar) -> f64 {
    s.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn sqrt_matches_reference() {
        let ctx = Ctx::new(50);
        let two = ctx.from_i64(2);
        let s = ctx.sqrt(&two);
        let sq = ctx.mul(&s, &s);
        let err = ctx.abs(&ctx.sub(&sq, &two));
        assert!(ctx.lt(&err, &ctx.from_f64(1e-45)));
        let f = ctx.to_f64(&s);
        assert!((f - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn rational_conversion_is_tight() {
        let ctx = Ctx::new(50);
        let x = ctx.from_scalar(&rat(1, 10));
        let ten = ctx.from_i64(10);
        let err = ctx.abs(&ctx.sub(&ctx.mul(&x, &ten), &ctx.one()));
        assert!(ctx.lt(&err, &ctx.from_f64(1e-45)));
    }

    #[test]
    fn atan2_quadrants() {
        let ctx = Ctx::new(50);
        let one = ctx.one();
        let neg = ctx.neg(&one);
        let pi = ctx.pi();
        let q2 = ctx.atan2(&one, &neg); // 3*pi/4
        let expect = ctx.mul(&pi, &ctx.from_f64(0.75));
        assert!(ctx.lt(&ctx.abs(&ctx.sub(&q2, &expect)), &ctx.from_f64(1e-40)));
        let q4 = ctx.atan2(&neg, &one); // -pi/4
        let expect = ctx.mul(&pi, &ctx.from_f64(-0.25));
        assert!(ctx.lt(&ctx.abs(&ctx.sub(&q4, &expect)), &ctx.from_f64(1e-40)));
        let south = ctx.atan2(&neg, &ctx.zero()); // -pi/2
        let expect = ctx.mul(&pi, &ctx.from_f64(-0.5));
        assert!(ctx.lt(&ctx.abs(&ctx.sub(&south, &expect)), &ctx.from_f64(1e-40)));
    }

    #[test]
    fn f64_round_trip() {
        let ctx = Ctx::new(50);
        for &v in &[0.0, -0.5, 1.25e-3, 3.0, -123.456] {
            let x = ctx.from_f64(v);
            assert_eq!(ctx.to_f64(&x), v);
        }
    }
}
