//! Dense univariate polynomials with arbitrary-precision integer coefficients.

use crate::dd::{Cdd, Dd};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Coefficients are stored lowest degree first; there is never a trailing
/// zero coefficient, so the zero polynomial has an empty coefficient vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut v = vec![BigInt::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// `x^n - 1`
    pub fn x_pow_minus_one(n: usize) -> Self {
        let mut v = vec![BigInt::zero(); n + 1];
        v[0] = BigInt::from(-1);
        v[n] = BigInt::one();
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn lead(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Nonnegative gcd of the coefficients (0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.lead().is_negative() {
            c = -c;
        }
        self.div_scalar_exact(&c)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Divide every coefficient by `k`; panics if a coefficient is not divisible.
    pub fn div_scalar_exact(&self, k: &BigInt) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .map(|c| {
                    let (q, r) = c.div_rem(k);
                    assert!(r.is_zero(), "inexact scalar division");
                    q
                })
                .collect(),
        )
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Homogenized value `b^deg f(a/b) = sum c_i a^i b^(deg-i)`.
    pub fn eval_homogeneous(&self, a: &BigInt, b: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        let mut bpow = BigInt::one();
        // Horner in a with powers of b accumulated from the top
        for (k, c) in self.coeffs.iter().rev().enumerate() {
            if k == 0 {
                acc = c.clone();
            } else {
                bpow *= b;
                acc = acc * a + c * &bpow;
            }
        }
        acc
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    pub fn eval_c64(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    pub fn eval_cdd(&self, z: Cdd) -> Cdd {
        let mut acc = Cdd::ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * z + Cdd::real(Dd::from_bigint(c));
        }
        acc
    }

    pub fn eval_dd(&self, x: Dd) -> Dd {
        let mut acc = Dd::ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + Dd::from_bigint(c);
        }
        acc
    }

    /// `f(x + c)`
    pub fn taylor_shift(&self, c: &BigInt) -> Self {
        let mut v = self.coeffs.clone();
        let n = v.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = &v[j + 1] * c;
                v[j] += t;
            }
        }
        Self::new(v)
    }

    /// `x^deg f(1/x)`
    pub fn reversed(&self) -> Self {
        let mut v = self.coeffs.clone();
        v.reverse();
        Self::new(v)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Pseudo-remainder: `lead(b)^(deg a - deg b + 1) a = q b + r`.
    pub fn pseudo_rem(&self, b: &Self) -> Self {
        assert!(!b.is_zero(), "pseudo-division by zero polynomial");
        let db = b.deg();
        if self.is_zero() || self.deg() < db {
            return self.clone();
        }
        let lb = b.lead();
        let mut r = self.coeffs.clone();
        let mut e = self.deg() - db + 1;
        while r.len() > db && !r.is_empty() {
            let dr = r.len() - 1;
            let lr = r[dr].clone();
            for c in r.iter_mut() {
                *c *= &lb;
            }
            for (i, bc) in b.coeffs.iter().enumerate() {
                r[dr - db + i] -= &lr * bc;
            }
            e -= 1;
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        if e > 0 {
            let f = num_traits::pow(lb, e);
            for c in r.iter_mut() {
                *c *= &f;
            }
        }
        Self::new(r)
    }

    /// Exact division over the integers, `None` when `b` does not divide `self`
    /// in `Z[x]`.
    pub fn div_exact(&self, b: &Self) -> Option<Self> {
        assert!(!b.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Self::zero());
        }
        let db = b.deg();
        if self.deg() < db {
            return None;
        }
        let lb = b.lead();
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); self.deg() - db + 1];
        for k in (0..q.len()).rev() {
            let top = &r[k + db];
            if top.is_zero() {
                continue;
            }
            let (qc, rem) = top.div_rem(&lb);
            if !rem.is_zero() {
                return None;
            }
            for (i, bc) in b.coeffs.iter().enumerate() {
                r[k + i] -= &qc * bc;
            }
            q[k] = qc;
        }
        if r.iter().all(|c| c.is_zero()) {
            Some(Self::new(q))
        } else {
            None
        }
    }

    /// Division with remainder over the rationals when `b` is monic.
    pub fn div_rem_monic(&self, b: &Self) -> (Self, Self) {
        assert!(b.is_monic(), "divisor must be monic");
        let db = b.deg();
        if self.is_zero() || self.deg() < db {
            return (Self::zero(), self.clone());
        }
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); self.deg() - db + 1];
        for k in (0..q.len()).rev() {
            let qc = r[k + db].clone();
            if qc.is_zero() {
                continue;
            }
            for (i, bc) in b.coeffs.iter().enumerate() {
                r[k + i] -= &qc * bc;
            }
            q[k] = qc;
        }
        (Self::new(q), Self::new(r))
    }

    /// Coefficients reduced into `[0, p)`, lowest degree first, normalized.
    pub fn reduce_mod(&self, p: u64) -> Vec<u64> {
        let pb = BigInt::from(p);
        let mut v: Vec<u64> = self
            .coeffs
            .iter()
            .map(|c| c.mod_floor(&pb).to_u64().unwrap())
            .collect();
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    }

    /// `f(k x)`
    pub fn compose_scale(&self, k: &BigInt) -> Self {
        let mut pw = BigInt::one();
        let mut v = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            v.push(c * &pw);
            pw *= k;
        }
        Self::new(v)
    }

    /// Euclidean norm of the coefficient vector as f64 (approximate).
    pub fn norm2_f64(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::MAX).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_coeff_bits(&self) -> u64 {
        self.coeffs.iter().map(|c| c.bits()).max().unwrap_or(0)
    }

    /// Monic-normalized f64 coefficients scaled to avoid overflow.
    pub fn to_f64_scaled(&self) -> Vec<f64> {
        let bits = self.max_coeff_bits();
        let shift = bits.saturating_sub(900);
        self.coeffs
            .iter()
            .map(|c| {
                let v: BigInt = if shift > 0 { c >> shift } else { c.clone() };
                v.to_f64().unwrap()
            })
            .collect()
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = !a.is_one() || i == 0;
            if show_coeff {
                write!(f, "{a}")?;
                if i > 0 {
                    write!(f, "*")?;
                }
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        v.serialize(s)
    }
}

impl<'a> Add<&'a IntPolynomial> for &'a IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, b: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(b.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i);
            let c = b.coeffs.get(i);
            v.push(match (a, c) {
                (Some(x), Some(y)) => x + y,
                (Some(x), None) => x.clone(),
                (None, Some(y)) => y.clone(),
                (None, None) => BigInt::zero(),
            });
        }
        IntPolynomial::new(v)
    }
}

impl<'a> Sub<&'a IntPolynomial> for &'a IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, b: &IntPolynomial) -> IntPolynomial {
        self + &(-b)
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl<'a> Mul<&'a IntPolynomial> for &'a IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, b: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || b.is_zero() {
            return IntPolynomial::zero();
        }
        let mut v = vec![BigInt::zero(); self.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    v[i + j] += x * y;
                }
            }
        }
        IntPolynomial::new(v)
    }
}

impl Add for IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, b: IntPolynomial) -> IntPolynomial {
        &self + &b
    }
}

impl Sub for IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, b: IntPolynomial) -> IntPolynomial {
        &self - &b
    }
}

impl Mul for IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, b: IntPolynomial) -> IntPolynomial {
        &self * &b
    }
}

impl Neg for IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        -&self
    }
}
