//! Rational points and the group law.

use super::curve::WeierstrassCurve;
use crate::error::{LabError, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurvePoint {
    Infinity,
    Affine(BigRational, BigRational),
}

fn q(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

impl CurvePoint {
    pub fn affine(x: BigRational, y: BigRational) -> Self {
        CurvePoint::Affine(x, y)
    }

    pub fn from_i64(x: i64, y: i64) -> Self {
        CurvePoint::Affine(BigRational::from_integer(x.into()), BigRational::from_integer(y.into()))
    }

    /// `x,y` with rational coordinates such as `1/4,-5/8`, or `O`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t == "O" || t == "inf" {
            return Ok(CurvePoint::Infinity);
        }
        let parts: Vec<&str> = t.trim_matches(|c| c == '(' || c == ')').split(',').collect();
        if parts.len() != 2 {
            return Err(LabError::pre(format!("point '{t}' must be 'x,y'")));
        }
        let parse = |s: &str| {
            s.trim().parse::<BigRational>().map_err(|_| LabError::pre(format!("bad point coordinate '{s}'")))
        };
        Ok(CurvePoint::Affine(parse(parts[0])?, parse(parts[1])?))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    pub fn x(&self) -> Option<&BigRational> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine(x, _) => Some(x),
        }
    }

    pub fn y(&self) -> Option<&BigRational> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine(_, y) => Some(y),
        }
    }

    pub fn is_integral(&self) -> bool {
        match self {
            CurvePoint::Infinity => true,
            CurvePoint::Affine(x, y) => x.is_integer() && y.is_integer(),
        }
    }
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Infinity => write!(f, "O"),
            CurvePoint::Affine(x, y) => write!(f, "({x},{y})"),
        }
    }
}

impl Serialize for CurvePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl WeierstrassCurve {
    pub fn contains(&self, p: &CurvePoint) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine(x, y) => {
                let lhs = y * y + q(&self.a1) * x * y + q(&self.a3) * y;
                let rhs = x * x * x + q(&self.a2) * x * x + q(&self.a4) * x + q(&self.a6);
                lhs == rhs
            }
        }
    }

    pub fn check(&self, p: &CurvePoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(LabError::OffCurve)
        }
    }

    pub fn neg(&self, p: &CurvePoint) -> CurvePoint {
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine(x, y) => CurvePoint::Affine(x.clone(), -y - q(&self.a1) * x - q(&self.a3)),
        }
    }

    /// Group law on points already known to be on the curve.
    pub fn add_unchecked(&self, p: &CurvePoint, r: &CurvePoint) -> CurvePoint {
        let (x1, y1, x2, y2) = match (p, r) {
            (CurvePoint::Infinity, _) => return r.clone(),
            (_, CurvePoint::Infinity) => return p.clone(),
            (CurvePoint::Affine(x1, y1), CurvePoint::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let (a1, a2, a3, a4, a6) = (q(&self.a1), q(&self.a2), q(&self.a3), q(&self.a4), q(&self.a6));
        let (lambda, nu) = if x1 == x2 {
            if (y1 + y2 + &a1 * x2 + &a3).is_zero() {
                return CurvePoint::Infinity;
            }
            let den = BigRational::from_integer(2.into()) * y1 + &a1 * x1 + &a3;
            let three = BigRational::from_integer(3.into());
            let two = BigRational::from_integer(2.into());
            let lam = (&three * x1 * x1 + &two * &a2 * x1 + &a4 - &a1 * y1) / &den;
            let nu = (-(x1 * x1 * x1) + &a4 * x1 + &two * &a6 - &a3 * y1) / &den;
            (lam, nu)
        } else {
            let den = x2 - x1;
            ((y2 - y1) / &den, (y1 * x2 - y2 * x1) / &den)
        };
        let x3 = &lambda * &lambda + &a1 * &lambda - &a2 - x1 - x2;
        let y3 = -(&lambda + &a1) * &x3 - nu - a3;
        CurvePoint::Affine(x3, y3)
    }

    pub fn add(&self, p: &CurvePoint, r: &CurvePoint) -> Result<CurvePoint> {
        self.check(p)?;
        self.check(r)?;
        Ok(self.add_unchecked(p, r))
    }

    pub fn sub(&self, p: &CurvePoint, r: &CurvePoint) -> Result<CurvePoint> {
        self.add(p, &self.neg(r))
    }

    pub fn double(&self, p: &CurvePoint) -> CurvePoint {
        self.add_unchecked(p, p)
    }

    pub fn mul_unchecked(&self, p: &CurvePoint, m: i64) -> CurvePoint {
        let mut base = if m < 0 { self.neg(p) } else { p.clone() };
        let mut k = m.unsigned_abs();
        let mut acc = CurvePoint::Infinity;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_unchecked(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.double(&base);
            }
        }
        acc
    }

    /// [m]P by double-and-add.
    pub fn mul(&self, p: &CurvePoint, m: i64) -> Result<CurvePoint> {
        self.check(p)?;
        Ok(self.mul_unchecked(p, m))
    }

    /// Smallest k ≤ `cap` with [k]P = O.
    pub fn order_up_to(&self, p: &CurvePoint, cap: u64) -> Option<u64> {
        let mut acc = p.clone();
        for k in 1..=cap {
            if acc.is_infinity() {
                return Some(k);
            }
            acc = self.add_unchecked(&acc, p);
        }
        None
    }

    /// Naive logarithmic height of x(P): log max(|num|, |den|).
    pub fn naive_height_x(&self, p: &CurvePoint) -> f64 {
        match p.x() {
            None => 0.0,
            Some(x) => {
                let m = x.numer().abs().max(x.denom().abs());
                if m.is_one() {
                    0.0
                } else {
                    crate::dd::ln_bigint(&m)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e37() -> WeierstrassCurve {
        WeierstrassCurve::from_i64([0, 0, 1, -1, 0]).unwrap()
    }

    #[test]
    fn multiples_on_37a() {
        let e = e37();
        let p = CurvePoint::from_i64(0, 0);
        assert_eq!(e.mul(&p, 2).unwrap(), CurvePoint::from_i64(1, 0));
        assert_eq!(e.mul(&p, 3).unwrap(), CurvePoint::from_i64(-1, -1));
        assert_eq!(e.mul(&p, 4).unwrap(), CurvePoint::from_i64(2, -3));
        assert_eq!(e.mul(&p, 5).unwrap(), CurvePoint::parse("1/4,-5/8").unwrap());
        assert_eq!(e.mul(&p, 0).unwrap(), CurvePoint::Infinity);
        assert_eq!(e.mul(&p, -1).unwrap(), e.neg(&p));
    }

    #[test]
    fn identity_and_inverse() {
        let e = e37();
        let p = CurvePoint::from_i64(0, 0);
        assert_eq!(e.add(&p, &CurvePoint::Infinity).unwrap(), p);
        assert_eq!(e.add(&p, &e.neg(&p)).unwrap(), CurvePoint::Infinity);
    }

    #[test]
    fn off_curve_rejected() {
        let e = e37();
        assert_eq!(e.add(&CurvePoint::from_i64(1, 1), &CurvePoint::Infinity), Err(LabError::OffCurve));
    }

    #[test]
    fn parse_points() {
        assert_eq!(CurvePoint::parse("O").unwrap(), CurvePoint::Infinity);
        assert_eq!(CurvePoint::parse("(0, 0)").unwrap(), CurvePoint::from_i64(0, 0));
        assert!(CurvePoint::parse("1").is_err());
    }
}
