//! Double-double floating point: an unevaluated sum `hi + lo` of two `f64`
//! values giving roughly 31 significant decimal digits.
//!
//! Only the operations needed by the period, logarithm and gap code are
//! provided. Transcendental functions are seeded in `f64` and corrected by
//! one or two Newton steps, or evaluated by Taylor series after range
//! reduction.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const PI: Dd = Dd { hi: 3.141592653589793, lo: 1.2246467991473532e-16 };
    pub const TWO_PI: Dd = Dd { hi: 6.283185307179586, lo: 2.4492935982947064e-16 };
    pub const HALF_PI: Dd = Dd { hi: 1.5707963267948966, lo: 6.123233995736766e-17 };
    pub const LN2: Dd = Dd { hi: 0.6931471805599453, lo: 2.3190468138462996e-17 };

    pub const fn new(hi: f64, lo: f64) -> Dd {
        Dd { hi, lo }
    }

    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn from_i64(x: i64) -> Dd {
        let hi = x as f64;
        let lo = (x - hi as i64) as f64;
        let (h, l) = quick_two_sum(hi, lo);
        Dd { hi: h, lo: l }
    }

    /// Nearest double-double to a big integer (relative error ~1e-32).
    pub fn from_bigint(x: &BigInt) -> Dd {
        let bits = x.bits();
        if bits <= 62 {
            return Dd::from_i64(x.to_i64().unwrap());
        }
        let shift = bits - 62;
        let top: BigInt = x >> shift;
        let rest: BigInt = x - (&top << shift);
        let rest_bits = rest.bits();
        let rest_f = if rest_bits > 62 {
            let s2 = rest_bits - 62;
            ((&rest >> s2).to_i64().unwrap() as f64) * 2f64.powi(s2 as i32)
        } else {
            rest.to_i64().unwrap() as f64
        };
        let t = Dd::from_i64(top.to_i64().unwrap()).ldexp(shift as i32);
        t + Dd::from_f64(rest_f)
    }

    pub fn from_rational(x: &BigRational) -> Dd {
        Dd::from_bigint(x.numer()) / Dd::from_bigint(x.denom())
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn ldexp(self, e: i32) -> Dd {
        let s = 2f64.powi(e);
        Dd { hi: self.hi * s, lo: self.lo * s }
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn is_negative(self) -> bool {
        self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0)
    }

    pub fn sqr(self) -> Dd {
        self * self
    }

    pub fn recip(self) -> Dd {
        Dd::ONE / self
    }

    pub fn floor(self) -> Dd {
        let hi = self.hi.floor();
        if hi == self.hi {
            let lo = self.lo.floor();
            let (h, l) = quick_two_sum(hi, lo);
            Dd { hi: h, lo: l }
        } else {
            Dd { hi, lo: 0.0 }
        }
    }

    pub fn round(self) -> Dd {
        (self + Dd::from_f64(0.5)).floor()
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let x = self.hi.sqrt();
        let xd = Dd::from_f64(x);
        xd + (self - xd.sqr()) / (xd * 2.0)
    }

    pub fn exp(self) -> Dd {
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / Dd::LN2.hi).round();
        let r = self - Dd::LN2 * k;
        // further reduce by 2^-10 so the series converges in a few terms
        let r = r.ldexp(-10);
        // expm1 series, then (1 + e)^2 - 1 = 2e + e^2 keeps relative accuracy
        let mut term = r;
        let mut e = r;
        for i in 2..=14 {
            term = term * r / (i as f64);
            e += term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        for _ in 0..10 {
            e = e * 2.0 + e.sqr();
        }
        let sum = e + Dd::ONE;
        sum.ldexp(k as i32)
    }

    pub fn ln(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::from_f64(f64::NAN);
        }
        let mut x = Dd::from_f64(self.hi.ln());
        for _ in 0..2 {
            x = x + self * (-x).exp() - Dd::ONE;
        }
        x
    }

    /// Sine and cosine together.
    pub fn sin_cos(self) -> (Dd, Dd) {
        let j = (self.hi / Dd::HALF_PI.hi).round();
        let t = self - Dd::HALF_PI * j;
        let t2 = t.sqr();
        // Taylor series on |t| <= pi/4
        let mut s = t;
        let mut c = Dd::ONE;
        let mut ts = t;
        let mut tc = Dd::ONE;
        for k in 1..=16 {
            let kk = (2 * k) as f64;
            ts = -(ts * t2) / (kk * (kk + 1.0));
            tc = -(tc * t2) / ((kk - 1.0) * kk);
            s += ts;
            c += tc;
            if ts.hi.abs() < 1e-36 && tc.hi.abs() < 1e-36 {
                break;
            }
        }
        match (j as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    pub fn sin(self) -> Dd {
        self.sin_cos().0
    }

    pub fn cos(self) -> Dd {
        self.sin_cos().1
    }

    pub fn atan2(y: Dd, x: Dd) -> Dd {
        if x.hi == 0.0 && y.hi == 0.0 {
            return Dd::ZERO;
        }
        let mut th = Dd::from_f64(y.to_f64().atan2(x.to_f64()));
        for _ in 0..2 {
            let (s, c) = th.sin_cos();
            let num = y * c - x * s;
            let den = x * c + y * s;
            th += num / den;
        }
        th
    }

    pub fn powi(self, n: i32) -> Dd {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut base = self;
        let mut e = n as u32;
        let mut acc = Dd::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base.sqr();
            e >>= 1;
        }
        acc
    }

    pub fn max(self, other: Dd) -> Dd {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Dd) -> Dd {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Nearest big integer (ties away from the floor).
    pub fn to_bigint_round(self) -> BigInt {
        let r = self.round();
        let hi = BigInt::from(r.hi as i128);
        let lo = BigInt::from(r.lo.round() as i128);
        hi + lo
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, b.hi);
        let p2 = p2 + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * q1;
        let q2 = r.hi / b.hi;
        let r = r - b * q2;
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Dd { hi: q1, lo: q2 } + Dd::from_f64(q3)
    }
}

impl Add<f64> for Dd {
    type Output = Dd;
    fn add(self, b: f64) -> Dd {
        self + Dd::from_f64(b)
    }
}

impl Sub<f64> for Dd {
    type Output = Dd;
    fn sub(self, b: f64) -> Dd {
        self - Dd::from_f64(b)
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    fn mul(self, b: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, b);
        let p2 = p2 + self.lo * b;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }
}

impl Div<f64> for Dd {
    type Output = Dd;
    fn div(self, b: f64) -> Dd {
        self / Dd::from_f64(b)
    }
}

impl AddAssign for Dd {
    fn add_assign(&mut self, b: Dd) {
        *self = *self + b;
    }
}

impl SubAssign for Dd {
    fn sub_assign(&mut self, b: Dd) {
        *self = *self - b;
    }
}

impl MulAssign for Dd {
    fn mul_assign(&mut self, b: Dd) {
        *self = *self * b;
    }
}

/// Complex number with double-double parts.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Cdd {
    pub const ZERO: Cdd = Cdd { re: Dd::ZERO, im: Dd::ZERO };
    pub const ONE: Cdd = Cdd { re: Dd::ONE, im: Dd::ZERO };
    pub const I: Cdd = Cdd { re: Dd::ZERO, im: Dd::ONE };

    pub fn new(re: Dd, im: Dd) -> Cdd {
        Cdd { re, im }
    }

    pub fn real(re: Dd) -> Cdd {
        Cdd { re, im: Dd::ZERO }
    }

    pub fn from_c64(z: Complex64) -> Cdd {
        Cdd { re: Dd::from_f64(z.re), im: Dd::from_f64(z.im) }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn conj(self) -> Cdd {
        Cdd { re: self.re, im: -self.im }
    }

    pub fn norm_sqr(self) -> Dd {
        self.re.sqr() + self.im.sqr()
    }

    pub fn abs(self) -> Dd {
        let a = self.re.abs();
        let b = self.im.abs();
        let m = a.max(b);
        if m.hi == 0.0 {
            return Dd::ZERO;
        }
        let (x, y) = (a / m, b / m);
        m * (x.sqr() + y.sqr()).sqrt()
    }

    pub fn arg(self) -> Dd {
        Dd::atan2(self.im, self.re)
    }

    pub fn scale(self, s: Dd) -> Cdd {
        Cdd { re: self.re * s, im: self.im * s }
    }

    pub fn recip(self) -> Cdd {
        Cdd::ONE / self
    }

    pub fn exp(self) -> Cdd {
        let r = self.re.exp();
        let (s, c) = self.im.sin_cos();
        Cdd { re: r * c, im: r * s }
    }

    pub fn ln(self) -> Cdd {
        Cdd { re: self.abs().ln(), im: self.arg() }
    }

    /// Principal square root.
    pub fn sqrt(self) -> Cdd {
        let r = self.abs();
        if r.hi == 0.0 {
            return Cdd::ZERO;
        }
        if !self.re.is_negative() {
            let t = ((r + self.re) * 0.5).sqrt();
            Cdd { re: t, im: self.im / (t * 2.0) }
        } else {
            let t = ((r - self.re) * 0.5).sqrt();
            let im = if self.im.is_negative() { -t } else { t };
            Cdd { re: self.im / (im * 2.0), im }
        }
    }

    pub fn powi(self, n: i32) -> Cdd {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut base = self;
        let mut e = n as u32;
        let mut acc = Cdd::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn is_zero(self) -> bool {
        self.re.hi == 0.0 && self.im.hi == 0.0
    }
}

impl Neg for Cdd {
    type Output = Cdd;
    fn neg(self) -> Cdd {
        Cdd { re: -self.re, im: -self.im }
    }
}

impl Add for Cdd {
    type Output = Cdd;
    fn add(self, b: Cdd) -> Cdd {
        Cdd { re: self.re + b.re, im: self.im + b.im }
    }
}

impl Sub for Cdd {
    type Output = Cdd;
    fn sub(self, b: Cdd) -> Cdd {
        Cdd { re: self.re - b.re, im: self.im - b.im }
    }
}

impl Mul for Cdd {
    type Output = Cdd;
    fn mul(self, b: Cdd) -> Cdd {
        Cdd {
            re: self.re * b.re - self.im * b.im,
            im: self.re * b.im + self.im * b.re,
        }
    }
}

impl Div for Cdd {
    type Output = Cdd;
    fn div(self, b: Cdd) -> Cdd {
        // scale to avoid overflow in the squared modulus
        let s = b.re.abs().max(b.im.abs());
        let br = b.re / s;
        let bi = b.im / s;
        let d = br.sqr() + bi.sqr();
        let re = (self.re * br + self.im * bi) / d / s;
        let im = (self.im * br - self.re * bi) / d / s;
        Cdd { re, im }
    }
}

impl Mul<Dd> for Cdd {
    type Output = Cdd;
    fn mul(self, b: Dd) -> Cdd {
        self.scale(b)
    }
}

impl Mul<f64> for Cdd {
    type Output = Cdd;
    fn mul(self, b: f64) -> Cdd {
        Cdd { re: self.re * b, im: self.im * b }
    }
}

impl AddAssign for Cdd {
    fn add_assign(&mut self, b: Cdd) {
        *self = *self + b;
    }
}

impl SubAssign for Cdd {
    fn sub_assign(&mut self, b: Cdd) {
        *self = *self - b;
    }
}

impl MulAssign for Cdd {
    fn mul_assign(&mut self, b: Cdd) {
        *self = *self * b;
    }
}

/// Natural logarithm of |x| for a big integer, accurate to f64 precision.
pub fn ln_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 1000 {
        return x.abs().to_f64().unwrap().ln();
    }
    let shift = bits - 60;
    let top: BigInt = x.abs() >> shift;
    top.to_f64().unwrap().ln() + (shift as f64) * std::f64::consts::LN_2
}

/// Natural logarithm of |x| for a big integer in double-double precision.
pub fn ln_bigint_dd(x: &BigInt) -> Dd {
    if x.is_zero() {
        return Dd::from_f64(f64::NEG_INFINITY);
    }
    let bits = x.bits();
    if bits <= 900 {
        return Dd::from_bigint(&x.abs()).ln();
    }
    let shift = bits - 120;
    let top: BigInt = x.abs() >> shift;
    Dd::from_bigint(&top).ln() + Dd::LN2 * (shift as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Dd, b: Dd, tol: f64) -> bool {
        (a - b).abs().to_f64() <= tol
    }

    #[test]
    fn pi_squared_identity() {
        // sin(pi/6) = 1/2 to full precision
        let s = (Dd::PI / 6.0).sin();
        assert!(close(s, Dd::from_f64(0.5), 1e-30));
        let (s, c) = Dd::from_f64(1.25).sin_cos();
        assert!(close(s.sqr() + c.sqr(), Dd::ONE, 1e-30));
    }

    #[test]
    fn exp_ln_roundtrip() {
        for &x in &[0.001, 0.5, 1.0, 3.7, 25.0, -12.5] {
            let d = Dd::from_f64(x);
            assert!(close(d.exp().ln(), d, 1e-29 * x.abs().max(1.0)));
        }
        assert!(close(Dd::from_f64(2.0).ln(), Dd::LN2, 1e-31));
    }

    #[test]
    fn atan2_quadrants() {
        let t = Dd::atan2(Dd::ONE, Dd::ONE);
        assert!(close(t * 4.0, Dd::PI, 1e-30));
        let t = Dd::atan2(Dd::from_f64(-1.0), Dd::from_f64(-1.0));
        assert!(close(t, -(Dd::PI * 0.75), 1e-30));
    }

    #[test]
    fn sqrt_and_division() {
        let two = Dd::from_f64(2.0);
        let r = two.sqrt();
        assert!(close(r * r, two, 1e-31));
        let third = Dd::ONE / Dd::from_f64(3.0);
        assert!(close(third * 3.0, Dd::ONE, 1e-31));
    }

    #[test]
    fn complex_sqrt_branch() {
        let z = Cdd::from_c64(Complex64::new(-4.0, 0.0));
        let r = z.sqrt();
        assert!(close(r.im, Dd::from_f64(2.0), 1e-30));
        let w = Cdd::from_c64(Complex64::new(0.3, -1.7));
        let s = w.sqrt();
        let back = s * s;
        assert!(close(back.re, w.re, 1e-30) && close(back.im, w.im, 1e-30));
    }

    #[test]
    fn bigint_conversion() {
        let x: BigInt = BigInt::from(3u8).pow(100);
        let d = Dd::from_bigint(&x);
        let back = (d / Dd::from_bigint(&BigInt::from(3u8).pow(99))).to_f64();
        assert!((back - 3.0).abs() < 1e-15);
        assert!((ln_bigint(&x) - 100.0 * 3f64.ln()).abs() < 1e-12);
        assert!(close(ln_bigint_dd(&x), Dd::from_f64(3.0).ln() * 100.0, 1e-28));
    }
}
