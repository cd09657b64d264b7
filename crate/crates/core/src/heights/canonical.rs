//! Canonical height by the local sum and by the doubling limit.

use super::local::{lambda_q_series, local_height_nonarch, support_primes, LocalHeightReport};
use crate::arith::algebraic::Place;
use crate::dd::ln_bigint;
use crate::elliptic::{elliptic_log, BadPrime, CurvePoint, PeriodLattice, WeierstrassCurve};
use crate::error::{LabError, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

/// Torsion points have ĥ below this.
pub const TORSION_HEIGHT_TOL: f64 = 1e-8;
const ARCH_TOL: f64 = 1e-30;
/// Bits allowed in the numerator of x([2ⁿ]P) for the limit route.
const LIMIT_BIT_BUDGET: u64 = 1 << 23;
pub const LIMIT_MAX_DOUBLINGS: u32 = 12;

/// A curve together with its period lattice and bad primes.
#[derive(Clone, Debug)]
pub struct EllipticContext {
    pub curve: WeierstrassCurve,
    pub lattice: PeriodLattice,
    pub bad: Vec<BadPrime>,
}

impl EllipticContext {
    pub fn new(curve: WeierstrassCurve) -> Result<Self> {
        let lattice = PeriodLattice::new(&curve)?;
        let bad = curve.bad_primes();
        Ok(EllipticContext { curve, lattice, bad })
    }

    pub fn from_i64(a: [i64; 5]) -> Result<Self> {
        Self::new(WeierstrassCurve::from_i64(a)?)
    }

    pub fn local_arch(&self, p: &CurvePoint) -> Result<LocalHeightReport> {
        super::local::local_height_arch(&self.curve, &self.lattice, p, ARCH_TOL)
    }

    /// ĥ(P) = Σ_v λ_v(P) with per-place breakdown; O gives zero.
    pub fn height_sum(&self, p: &CurvePoint) -> Result<(f64, Vec<LocalHeightReport>)> {
        self.curve.check(p)?;
        if p.is_infinity() {
            return Ok((0.0, Vec::new()));
        }
        let z = elliptic_log(&self.curve, &self.lattice, p)?;
        let arch = lambda_q_series(&self.lattice, z, ARCH_TOL);
        let mut total = arch;
        let mut parts = vec![LocalHeightReport {
            place: Place::Archimedean,
            value: arch.to_f64(),
            method: super::local::HeightMethod::QSeries,
            tate: None,
        }];
        for q in support_primes(&self.bad, p) {
            let r = local_height_nonarch(&self.curve, p, q)?;
            total += crate::dd::Dd::from_f64(r.value);
            parts.push(r);
        }
        Ok((total.to_f64(), parts))
    }

    pub fn height(&self, p: &CurvePoint) -> Result<f64> {
        Ok(self.height_sum(p)?.0)
    }

    /// Lower and upper constants with −lo ≤ ĥ − ½h(x) ≤ hi.
    pub fn naive_difference_bounds(&self) -> (f64, f64) {
        let hj = {
            let j = &self.curve.j;
            ln_bigint(&j.numer().abs().max(j.denom().abs()))
        };
        let hd = ln_bigint(&self.curve.disc);
        (hj / 8.0 + hd / 12.0 + 0.973, hj / 12.0 + hd / 12.0 + 1.07)
    }

    /// ½·4⁻ⁿ·h(x([2ⁿ]P)) with gcd-free x-only doubling; returns
    /// (value, n, tail bound). Common factors of the doubled numerator and
    /// denominator divide a power of 2Δ, so only those primes are stripped.
    pub fn height_limit(&self, p: &CurvePoint, max_doublings: u32) -> Result<(f64, u32, f64)> {
        self.curve.check(p)?;
        let x = match p.x() {
            None => return Ok((0.0, 0, 0.0)),
            Some(x) => x.clone(),
        };
        let e = &self.curve;
        let mut strip: Vec<u64> = self.bad.iter().map(|b| b.p).collect();
        if !strip.contains(&2) {
            strip.push(2);
        }
        let (mut a, mut b) = (x.numer().clone(), x.denom().clone());
        let mut n = 0;
        let (lo, hi) = self.naive_difference_bounds();
        while n < max_doublings {
            let bits = a.bits().max(b.bits());
            if bits.saturating_mul(4) > LIMIT_BIT_BUDGET && n > 0 {
                break;
            }
            let a2 = &a * &a;
            let b2 = &b * &b;
            let ab = &a * &b;
            let b3 = &b2 * &b;
            let num: BigInt = &a2 * &a2 - &e.b4 * &a2 * &b2 - 2 * &e.b6 * &a * &b3 - &e.b8 * &b2 * &b2;
            let den: BigInt = &b * (4 * &a2 * &a + &e.b2 * &a2 * &b + 2 * &e.b4 * &ab * &b + &e.b6 * &b3);
            if den.is_zero() {
                // [2ⁿ]P hit a 2-torsion point, so P is torsion
                return Ok((0.0, n + 1, 0.0));
            }
            let (mut num, mut den) = (num, den);
            for &q in &strip {
                let qb = BigInt::from(q);
                while !num.is_zero() && num.is_multiple_of(&qb) && den.is_multiple_of(&qb) {
                    num /= &qb;
                    den /= &qb;
                }
            }
            if num.is_zero() {
                den = BigInt::from(1);
            }
            if den.is_negative() {
                num = -num;
                den = -den;
            }
            a = num;
            b = den;
            n += 1;
        }
        let h = if a.is_zero() { ln_bigint(&b) } else { ln_bigint(&a.abs().max(b.clone())) };
        let scale = 4f64.powi(n as i32);
        Ok((0.5 * h / scale, n, lo.max(hi) / scale))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CanonicalHeightReport {
    pub point: CurvePoint,
    pub local: Vec<LocalHeightReport>,
    pub sum_value: f64,
    pub limit_value: f64,
    pub limit_doublings: u32,
    pub limit_tail_bound: f64,
    pub delta: f64,
    pub is_torsion: bool,
}

pub fn canonical_height(ctx: &EllipticContext, p: &CurvePoint) -> Result<CanonicalHeightReport> {
    let (sum_value, local) = ctx.height_sum(p)?;
    let (limit_value, n, tail) = ctx.height_limit(p, LIMIT_MAX_DOUBLINGS)?;
    Ok(CanonicalHeightReport {
        point: p.clone(),
        local,
        sum_value,
        limit_value,
        limit_doublings: n,
        limit_tail_bound: tail,
        delta: (sum_value - limit_value).abs(),
        is_torsion: sum_value < TORSION_HEIGHT_TOL,
    })
}

/// |ĥ(P) − ĥ(P − T)| for a rational torsion point T.
pub fn torsion_invariance_check(ctx: &EllipticContext, p: &CurvePoint, t: &CurvePoint) -> Result<f64> {
    if ctx.curve.torsion_order(t)?.is_none() {
        return Err(LabError::pre(format!("{t} is not a torsion point")));
    }
    if t.is_infinity() {
        ctx.curve.check(p)?;
        return Ok(0.0);
    }
    let pt = ctx.curve.sub(p, t)?;
    Ok((ctx.height(p)? - ctx.height(&pt)?).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_of_37a() {
        let ctx = EllipticContext::from_i64([0, 0, 1, -1, 0]).unwrap();
        let p = CurvePoint::from_i64(0, 0);
        let r = canonical_height(&ctx, &p).unwrap();
        assert!((r.sum_value - 0.0255557041199844201).abs() < 1e-14, "{}", r.sum_value);
        assert!(r.delta < 1e-6, "{r:?}");
        let h2 = ctx.height(&ctx.curve.mul(&p, 2).unwrap()).unwrap();
        assert!((h2 / r.sum_value - 4.0).abs() < 1e-5);
    }

    #[test]
    fn torsion_heights_vanish() {
        let ctx = EllipticContext::from_i64([0, -1, 1, 0, 0]).unwrap();
        for (x, y) in [(0, 0), (1, -1), (1, 0), (0, -1)] {
            let h = ctx.height(&CurvePoint::from_i64(x, y)).unwrap();
            assert!(h.abs() < 1e-8, "({x},{y}) {h}");
        }
        assert_eq!(torsion_invariance_check(&ctx, &CurvePoint::from_i64(0, 0), &CurvePoint::Infinity).unwrap(), 0.0);
        assert!(torsion_invariance_check(&EllipticContext::from_i64([0, 0, 1, -1, 0]).unwrap(), &CurvePoint::Infinity, &CurvePoint::from_i64(0, 0)).is_err());
    }
}
