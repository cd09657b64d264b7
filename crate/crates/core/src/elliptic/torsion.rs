//! Rational torsion via Lutz–Nagell on the short model
//! Y² = X³ − 27c4·X − 54c6 with X = 36x + 3b2, Y = 108(2y + a1x + a3).

use super::curve::WeierstrassCurve;
use super::point::CurvePoint;
use crate::arith::factor::factor;
use crate::arith::poly::IntPolynomial;
use crate::arith::zfactor::rational_roots;
use crate::error::{LabError, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// A torsion point has an order bounded well below this by Mazur; the cap
/// only guards the loop.
const ORDER_CAP: u64 = 64;

impl WeierstrassCurve {
    pub fn to_short_model(&self, p: &CurvePoint) -> Option<(BigRational, BigRational)> {
        let (x, y) = (p.x()?, p.y()?);
        let i = |n: i64| BigRational::from_integer(n.into());
        let q = |n: &BigInt| BigRational::from_integer(n.clone());
        let xs = i(36) * x + i(3) * q(&self.b2);
        let ys = i(108) * (i(2) * y + q(&self.a1) * x + q(&self.a3));
        Some((xs, ys))
    }

    pub fn from_short_model(&self, xs: &BigRational, ys: &BigRational) -> CurvePoint {
        let i = |n: i64| BigRational::from_integer(n.into());
        let q = |n: &BigInt| BigRational::from_integer(n.clone());
        let x = (xs - i(3) * q(&self.b2)) / i(36);
        let y = (ys / i(108) - q(&self.a1) * &x - q(&self.a3)) / i(2);
        CurvePoint::Affine(x, y)
    }

    fn short_integral(&self, p: &CurvePoint) -> bool {
        match self.to_short_model(p) {
            None => true,
            Some((x, y)) => x.is_integer() && y.is_integer(),
        }
    }

    /// Exact order if P is torsion: every multiple of a torsion point is
    /// integral on the short model, so a non-integral multiple certifies
    /// infinite order.
    pub fn torsion_order(&self, p: &CurvePoint) -> Result<Option<u64>> {
        self.check(p)?;
        let mut acc = p.clone();
        for k in 1..=ORDER_CAP {
            if acc.is_infinity() {
                return Ok(Some(k));
            }
            if !self.short_integral(&acc) {
                return Ok(None);
            }
            acc = self.add_unchecked(&acc, p);
        }
        Err(LabError::inv(format!("order of {p} not resolved within {ORDER_CAP} steps")))
    }
}

/// All rational torsion points with their exact orders, O first, then by
/// order and coordinates.
pub fn rational_torsion(e: &WeierstrassCurve) -> Result<Vec<(CurvePoint, u64)>> {
    let a = BigInt::from(-27) * &e.c4;
    let b = BigInt::from(-54) * &e.c6;
    let d = BigInt::from(4) * &a * &a * &a + BigInt::from(27) * &b * &b;
    let mut ys: Vec<BigInt> = vec![BigInt::one()];
    for (p, k) in factor(d.magnitude()).factors.iter() {
        let p = BigInt::from(p.clone());
        let mut next = Vec::new();
        for y in &ys {
            let mut pe = BigInt::one();
            for _ in 0..=(k / 2) {
                next.push(y * &pe);
                pe *= &p;
            }
        }
        ys = next;
    }
    ys.push(BigInt::zero());
    let mut found: Vec<(CurvePoint, u64)> = vec![(CurvePoint::Infinity, 1)];
    for y in ys {
        let cubic = IntPolynomial::new(vec![&b - &y * &y, a.clone(), BigInt::zero(), BigInt::one()]);
        for x in rational_roots(&cubic) {
            let signs: &[i64] = if y.is_zero() { &[1] } else { &[1, -1] };
            for &s in signs {
                let yy = BigRational::from_integer(&y * s);
                let p = e.from_short_model(&x, &yy);
                if !e.contains(&p) {
                    return Err(LabError::inv(format!("short-model point {x},{yy} does not map onto the curve")));
                }
                if let Some(n) = e.torsion_order(&p)? {
                    found.push((p, n));
                }
            }
        }
    }
    found.sort_by(|(p, m), (q, n)| m.cmp(n).then_with(|| p.cmp(q)));
    found.dedup();
    Ok(found)
}

/// Group order of the rational torsion and its structure as (n1, n2) with
/// E(Q)_tors ≅ Z/n1 × Z/n2, n2 | n1.
pub fn torsion_structure(points: &[(CurvePoint, u64)]) -> (u64, u64) {
    let total = points.len() as u64;
    let exponent = points.iter().map(|(_, n)| *n).max().unwrap_or(1);
    (exponent, total / exponent)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z5_on_11a() {
        let e = WeierstrassCurve::from_i64([0, -1, 1, 0, 0]).unwrap();
        let t = rational_torsion(&e).unwrap();
        let pts: Vec<CurvePoint> = t.iter().map(|(p, _)| p.clone()).collect();
        assert_eq!(t.len(), 5);
        for p in [(0, 0), (1, -1), (1, 0), (0, -1)] {
            assert!(pts.contains(&CurvePoint::from_i64(p.0, p.1)));
        }
        assert!(t[1..].iter().all(|(_, n)| *n == 5));
        assert_eq!(torsion_structure(&t), (5, 1));
    }

    #[test]
    fn trivial_on_37a() {
        let e = WeierstrassCurve::from_i64([0, 0, 1, -1, 0]).unwrap();
        assert_eq!(rational_torsion(&e).unwrap(), vec![(CurvePoint::Infinity, 1)]);
        assert_eq!(e.torsion_order(&CurvePoint::from_i64(0, 0)).unwrap(), None);
    }

    #[test]
    fn z6_on_x3_plus_1() {
        let e = WeierstrassCurve::from_i64([0, 0, 0, 0, 1]).unwrap();
        let t = rational_torsion(&e).unwrap();
        assert_eq!(t.len(), 6);
        let order = |x: i64, y: i64| t.iter().find(|(p, _)| *p == CurvePoint::from_i64(x, y)).map(|(_, n)| *n);
        assert_eq!(order(-1, 0), Some(2));
        assert_eq!(order(0, 1), Some(3));
        assert_eq!(order(0, -1), Some(3));
        assert_eq!(order(2, 3), Some(6));
        assert_eq!(order(2, -3), Some(6));
    }

    #[test]
    fn full_two_torsion_on_congruent_curve() {
        let e = WeierstrassCurve::from_i64([0, 0, 0, -1, 0]).unwrap();
        let t = rational_torsion(&e).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(torsion_structure(&t), (2, 2));
    }
}
