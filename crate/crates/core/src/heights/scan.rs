//! S-integrality of torsion relative to a nontorsion point, orbit averages of
//! local heights, and small searches for sample curves and points.

use super::canonical::{EllipticContext, TORSION_HEIGHT_TOL};
use super::local::{lambda_at_coords_f64, lambda_q_series, local_height_nonarch};
use crate::arith::algebraic::PlaceSet;
use crate::arith::factor::factor_with_budget;
use crate::arith::modp::gcd_degree_mod;
use crate::arith::poly::IntPolynomial;
use crate::dd::Dd;
use crate::elliptic::division::DivisionTower;
use crate::elliptic::torsion::rational_torsion;
use crate::elliptic::{elliptic_log, CurvePoint, WeierstrassCurve};
use crate::error::{LabError, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

pub const TORSION_ALPHA_MSG: &str = "alpha torsion: hypothesis violated";
pub const TORSION_SCAN_RHO_BUDGET: u64 = 50_000;
const AVERAGE_TOL: f64 = 1e-20;

/// How α and the torsion pair meet modulo p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CollisionKind {
    /// x(α) is a root of f_N mod p.
    Root,
    /// Both reduce to the point at infinity.
    Infinity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionCollision {
    #[serde(serialize_with = "crate::ser::display")]
    pub prime: BigUint,
    pub kind: CollisionKind,
    /// deg gcd(f_N, bx − a) mod p for root collisions, the drop in degree of
    /// f_N mod p for collisions at infinity.
    pub witness_degree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionIntegralityVerdict {
    pub n: u64,
    /// Degree of f_N.
    pub degree: usize,
    /// Homogenized f_N at x(α) = a/b.
    #[serde(serialize_with = "crate::ser::display")]
    pub value: BigInt,
    pub collision_primes: Vec<TorsionCollision>,
    /// Unsplit composite part of |value| outside S.
    #[serde(serialize_with = "crate::ser::display_opt")]
    pub unfactored: Option<BigUint>,
    pub integral: bool,
}

impl TorsionIntegralityVerdict {
    pub fn prime_list(&self) -> Vec<String> {
        let mut v: Vec<String> = self.collision_primes.iter().map(|c| c.prime.to_string()).collect();
        if let Some(c) = &self.unfactored {
            v.push(format!("[{c}]"));
        }
        v
    }
}

/// Fails unless α is a nontorsion point with ĥ(α) above the torsion cutoff.
pub fn require_nontorsion(ctx: &EllipticContext, alpha: &CurvePoint) -> Result<f64> {
    ctx.curve.check(alpha)?;
    if alpha.is_infinity() || ctx.curve.torsion_order(alpha)?.is_some() {
        return Err(LabError::pre(TORSION_ALPHA_MSG));
    }
    let h = ctx.height(alpha)?;
    if h <= TORSION_HEIGHT_TOL {
        return Err(LabError::pre(TORSION_ALPHA_MSG));
    }
    Ok(h)
}

/// S together with every prime of bad reduction.
pub fn enlarge_with_bad_primes(ctx: &EllipticContext, s: &PlaceSet) -> PlaceSet {
    let mut out = s.clone();
    for b in &ctx.bad {
        out.insert(b.p);
    }
    out
}

fn torsion_polynomial(tower: &mut DivisionTower, n: u64) -> Result<IntPolynomial> {
    if n == 1 {
        // the orbit is {O}, met exactly at the primes of the denominator
        return Ok(IntPolynomial::zero());
    }
    tower.primitive(n)
}

fn verdict_for(
    f: &IntPolynomial,
    n: u64,
    a: &BigInt,
    b: &BigInt,
    s: &PlaceSet,
    budget: u64,
) -> Result<TorsionIntegralityVerdict> {
    let value = if n == 1 { b.clone() } else { f.eval_homogeneous(a, b) };
    if value.is_zero() {
        return Err(LabError::inv(format!("x(alpha) is a root of f_{n}, so alpha is torsion")));
    }
    let integral = s.strip(&value).is_one();
    let pf = factor_with_budget(value.magnitude(), budget);
    let mut collision_primes = Vec::with_capacity(pf.factors.len());
    for (p, _) in &pf.factors {
        let pi = BigInt::from(p.clone());
        let (kind, witness_degree) = if b.is_multiple_of(&pi) {
            let drop = if n == 1 { 1 } else { f.deg() - reduced_degree(f, &pi) };
            (CollisionKind::Infinity, drop)
        } else {
            let lin = IntPolynomial::new(vec![-a.clone(), b.clone()]);
            (CollisionKind::Root, gcd_degree_mod(f, &lin, &pi))
        };
        if witness_degree == 0 {
            return Err(LabError::inv(format!("prime {p} divides the f_{n} value but has no witness")));
        }
        collision_primes.push(TorsionCollision { prime: p.clone(), kind, witness_degree });
    }
    Ok(TorsionIntegralityVerdict { n, degree: f.deg(), value, collision_primes, unfactored: pf.cofactor, integral })
}

fn reduced_degree(f: &IntPolynomial, p: &BigInt) -> usize {
    f.coeffs().iter().rposition(|c| !c.is_multiple_of(p)).unwrap_or(0)
}

/// Collision primes of the torsion pairs {±ξ} of exact order N = 1..=n_max
/// with α. S is enlarged by the bad primes before the verdicts are taken.
pub fn s_integral_torsion_scan(
    ctx: &EllipticContext,
    alpha: &CurvePoint,
    s: &PlaceSet,
    n_max: u64,
) -> Result<Vec<TorsionIntegralityVerdict>> {
    if n_max == 0 {
        return Err(LabError::pre("N_max must be positive"));
    }
    require_nontorsion(ctx, alpha)?;
    let s = enlarge_with_bad_primes(ctx, s);
    let x = alpha.x().unwrap();
    let (a, b) = (x.numer().clone(), x.denom().clone());
    let mut tower = DivisionTower::new(&ctx.curve);
    let polys = (1..=n_max).map(|n| torsion_polynomial(&mut tower, n)).collect::<Result<Vec<_>>>()?;
    polys
        .par_iter()
        .enumerate()
        .map(|(i, f)| verdict_for(f, i as u64 + 1, &a, &b, &s, TORSION_SCAN_RHO_BUDGET))
        .collect()
}

pub fn integral_torsion_orders(verdicts: &[TorsionIntegralityVerdict]) -> Vec<u64> {
    verdicts.iter().filter(|v| v.integral).map(|v| v.n).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorsionAverage {
    pub n: u64,
    pub orbit_size: usize,
    pub average: f64,
    pub max: f64,
    pub min: f64,
    /// Annulus parameter: terms with dist(z_α − ξ, Λ) < |ω1|/D are "near".
    pub d: f64,
    pub near_count: usize,
    pub near_sum: f64,
}

/// Primitive N-torsion as lattice fractions: (l1, l2) mod N with
/// gcd(l1, l2, N) = 1.
pub fn primitive_orbit(n: u64) -> Vec<(i64, i64)> {
    let n = n as i64;
    let mut out = Vec::new();
    for l1 in 0..n {
        for l2 in 0..n {
            if l1.gcd(&l2).gcd(&n) == 1 {
                out.push((l1, l2));
            }
        }
    }
    out
}

/// (1/#orbit) Σ_ξ λ_∞(α ⊖ ξ) over the full primitive N-torsion, evaluated at
/// z_α − ξ. Without `d` the annulus uses D = ⌈#orbit^{1/8}⌉.
pub fn torsion_average_series(
    ctx: &EllipticContext,
    alpha: &CurvePoint,
    ns: &[u64],
    d: Option<f64>,
) -> Result<Vec<TorsionAverage>> {
    require_nontorsion(ctx, alpha)?;
    if ns.contains(&0) {
        return Err(LabError::pre("torsion orders must be positive"));
    }
    if d.is_some_and(|d| d.is_nan() || d <= 0.0) {
        return Err(LabError::pre("annulus parameter D must be positive"));
    }
    let lat = &ctx.lattice;
    let za = elliptic_log(&ctx.curve, lat, alpha)?;
    let w = lat.omega1.abs().to_f64();
    Ok(ns
        .par_iter()
        .map(|&n| {
            let orbit = primitive_orbit(n);
            let dd = d.unwrap_or_else(|| (orbit.len() as f64).powf(0.125).ceil());
            let (mut sum, mut max, mut min) = (Dd::ZERO, f64::NEG_INFINITY, f64::INFINITY);
            let (mut near_count, mut near_sum) = (0, 0.0);
            for &(l1, l2) in &orbit {
                let z = za - lat.fraction(l1, l2, n);
                let v = lambda_q_series(lat, z, AVERAGE_TOL);
                let vf = v.to_f64();
                sum += v;
                max = max.max(vf);
                min = min.min(vf);
                if lat.distance_to_lattice(z).to_f64() < w / dd {
                    near_count += 1;
                    near_sum += vf;
                }
            }
            TorsionAverage {
                n,
                orbit_size: orbit.len(),
                average: (sum / orbit.len() as f64).to_f64(),
                max,
                min,
                d: dd,
                near_count,
                near_sum,
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonarchAverage {
    pub n: u64,
    pub p: u64,
    pub orbit_size: usize,
    pub average: f64,
    /// Some translate α − T reduces to O mod p.
    pub collision: bool,
}

/// Nonarchimedean analogue over the rational torsion of exact order N:
/// (1/#T) Σ_T λ_p(α − T). At a good prime the terms are ½max(0, −ord_p x)·log p,
/// so the average vanishes exactly when α meets no T modulo p.
pub fn nonarch_torsion_average(ctx: &EllipticContext, alpha: &CurvePoint, p: u64) -> Result<Vec<NonarchAverage>> {
    require_nontorsion(ctx, alpha)?;
    let tors = rational_torsion(&ctx.curve)?;
    let mut orders: Vec<u64> = tors.iter().map(|(_, n)| *n).collect();
    orders.dedup();
    let mut out = Vec::new();
    for n in orders {
        let mut sum = 0.0;
        let mut count = 0;
        let mut collision = false;
        for (t, _) in tors.iter().filter(|(_, m)| *m == n) {
            let q = ctx.curve.sub(alpha, t)?;
            let r = local_height_nonarch(&ctx.curve, &q, p)?;
            let meets = q.x().is_some_and(|x| crate::arith::factor::valuation(x.denom(), p) > 0);
            collision |= meets;
            sum += r.value;
            count += 1;
        }
        out.push(NonarchAverage { n, p, orbit_size: count, average: sum / count as f64, collision });
    }
    Ok(out)
}

/// Mean of λ_∞ over the fundamental domain by the midpoint rule on a
/// grid×grid lattice in the reduced basis.
pub fn lambda_mean_quadrature(ctx: &EllipticContext, grid: usize) -> Result<f64> {
    if grid == 0 {
        return Err(LabError::pre("quadrature grid must be positive"));
    }
    let tau = ctx.lattice.tau.to_c64();
    let h = 1.0 / grid as f64;
    let total: f64 = (0..grid)
        .into_par_iter()
        .map(|i| {
            let t = (i as f64 + 0.5) * h;
            (0..grid).map(|j| lambda_at_coords_f64(tau, (j as f64 + 0.5) * h, t)).sum::<f64>()
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    Ok(total * h * h)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundednessRow {
    pub m: i64,
    pub local: f64,
    pub naive: f64,
    pub difference: f64,
}

/// λ_∞([m]P) − ½log max(1, |x([m]P)|) for m = 1..=m_max, skipping multiples
/// equal to O.
pub fn arch_boundedness_scan(ctx: &EllipticContext, p: &CurvePoint, m_max: i64) -> Result<Vec<BoundednessRow>> {
    ctx.curve.check(p)?;
    let mut out = Vec::new();
    let mut q = CurvePoint::Infinity;
    for m in 1..=m_max {
        q = ctx.curve.add(&q, p)?;
        if q.is_infinity() {
            continue;
        }
        let local = ctx.local_arch(&q)?.value;
        let x = crate::dd::Dd::from_rational(q.x().unwrap()).abs().to_f64();
        let naive = 0.5 * x.max(1.0).ln();
        out.push(BoundednessRow { m, local, naive, difference: local - naive });
    }
    Ok(out)
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer().clone(), q.denom().clone());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == n && &sd * &sd == d).then(|| BigRational::new(sn, sd))
}

/// Points with x = n/d², |n| ≤ x_bound·d², 1 ≤ d ≤ d_max, sorted.
pub fn small_points(e: &WeierstrassCurve, x_bound: i64, d_max: i64) -> Vec<CurvePoint> {
    let q = |v: &BigInt| BigRational::from_integer(v.clone());
    let mut out = Vec::new();
    for d in 1..=d_max {
        let d2 = d * d;
        for n in -x_bound * d2..=x_bound * d2 {
            if d > 1 && n.gcd(&d) != 1 {
                continue;
            }
            let x = BigRational::new(n.into(), d2.into());
            let h = q(&e.a1) * &x + q(&e.a3);
            let g = &x * &x * &x + q(&e.a2) * &x * &x + q(&e.a4) * &x + q(&e.a6);
            let disc = &h * &h + BigRational::from_integer(4.into()) * &g;
            if let Some(r) = rational_sqrt(&disc) {
                let two = BigRational::from_integer(2.into());
                for y in [(-&h + &r) / &two, (-&h - &r) / &two] {
                    out.push(CurvePoint::Affine(x.clone(), y));
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// #E(F_p) by counting, for a prime p of good reduction.
pub fn count_points_mod_p(e: &WeierstrassCurve, p: u64) -> u64 {
    let r = |v: &BigInt| v.mod_floor(&BigInt::from(p)).try_into().unwrap_or(0u64);
    let [a1, a2, a3, a4, a6] = e.coefficients().map(r);
    let mut count = 1;
    for x in 0..p {
        let rhs = (((x * x % p) * x) % p + a2 * x % p * x % p + a4 * x % p + a6) % p;
        for y in 0..p {
            let lhs = (y * y % p + (a1 * x % p + a3) % p * y % p) % p;
            if lhs == rhs {
                count += 1;
            }
        }
    }
    count
}

#[derive(Clone, Debug, Serialize)]
pub struct TorsionRankExample {
    pub curve: WeierstrassCurve,
    pub point: CurvePoint,
    pub height: f64,
    pub torsion: Vec<CurvePoint>,
}

fn curve_grid(bound: i64) -> impl Iterator<Item = [i64; 5]> {
    let r = move || -bound..=bound;
    r().flat_map(move |a1| {
        r().flat_map(move |a2| r().flat_map(move |a3| r().flat_map(move |a4| r().map(move |a6| [a1, a2, a3, a4, a6]))))
    })
}

/// First minimal semistable curve with |a_i| ≤ bound, rational torsion of
/// order `torsion_order` and a point of height above `min_height` among the
/// small points with |x| ≤ 20.
pub fn find_torsion_rank_example(bound: i64, torsion_order: usize, min_height: f64) -> Result<TorsionRankExample> {
    let filter_primes = [2u64, 3, 7, 11, 13, 17, 19, 23];
    for a in curve_grid(bound) {
        let Ok(e) = WeierstrassCurve::from_i64(a) else { continue };
        if !e.is_semistable() || !e.is_minimal() {
            continue;
        }
        let bad: Vec<u64> = e.bad_primes().iter().map(|b| b.p).collect();
        let tp = torsion_order as u64;
        if filter_primes
            .iter()
            .filter(|p| !bad.contains(p) && **p != tp)
            .any(|&p| count_points_mod_p(&e, p) % tp != 0)
        {
            continue;
        }
        let tors = rational_torsion(&e)?;
        if tors.len() != torsion_order {
            continue;
        }
        let ctx = EllipticContext::new(e.clone())?;
        for pt in small_points(&e, 20, 2) {
            if e.torsion_order(&pt)?.is_some() {
                continue;
            }
            let h = ctx.height(&pt)?;
            if h > min_height {
                return Ok(TorsionRankExample {
                    curve: e,
                    point: pt,
                    height: h,
                    torsion: tors.into_iter().map(|(t, _)| t).collect(),
                });
            }
        }
    }
    Err(LabError::pre(format!("no example with |a_i| <= {bound} and torsion of order {torsion_order}")))
}

/// Up to `count` (curve, nontorsion point) pairs on minimal semistable curves
/// with |a_i| ≤ 1 and integral points with |x| ≤ 4, at most two per curve
/// and with distinct x-coordinates.
pub fn sample_height_pairs(count: usize) -> Result<Vec<(WeierstrassCurve, CurvePoint)>> {
    let mut out = Vec::new();
    for a in curve_grid(1) {
        let Ok(e) = WeierstrassCurve::from_i64(a) else { continue };
        if !e.is_semistable() || !e.is_minimal() {
            continue;
        }
        let mut taken: Vec<CurvePoint> = Vec::new();
        for pt in small_points(&e, 4, 1) {
            if taken.len() == 2 || out.len() == count {
                break;
            }
            // skip -P once P is in
            if taken.iter().any(|q| q.x() == pt.x()) {
                continue;
            }
            if e.torsion_order(&pt)?.is_none() {
                out.push((e.clone(), pt.clone()));
                taken.push(pt);
            }
        }
        if out.len() == count {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx37() -> EllipticContext {
        EllipticContext::from_i64([0, 0, 1, -1, 0]).unwrap()
    }

    #[test]
    fn small_orders_on_37a() {
        let ctx = ctx37();
        let s = PlaceSet::from_primes([37]).unwrap();
        let v = s_integral_torsion_scan(&ctx, &CurvePoint::from_i64(0, 0), &s, 3).unwrap();
        assert_eq!(v[1].value, BigInt::from(1));
        assert_eq!(v[2].value, BigInt::from(-1));
        assert!(v.iter().all(|r| r.integral && r.collision_primes.is_empty()));
    }

    #[test]
    fn torsion_alpha_is_rejected() {
        let ctx = EllipticContext::from_i64([0, -1, 1, 0, 0]).unwrap();
        let err = s_integral_torsion_scan(&ctx, &CurvePoint::from_i64(0, 0), &PlaceSet::archimedean_only(), 4);
        assert!(matches!(err, Err(LabError::Precondition(m)) if m == TORSION_ALPHA_MSG));
    }

    #[test]
    fn orbit_sizes() {
        assert_eq!(primitive_orbit(1).len(), 1);
        assert_eq!(primitive_orbit(5).len(), 24);
        assert_eq!(primitive_orbit(12).len(), 96);
    }

    #[test]
    fn trivial_average_is_local_height() {
        let ctx = ctx37();
        let p = CurvePoint::from_i64(0, 0);
        let r = torsion_average_series(&ctx, &p, &[1], None).unwrap();
        assert!((r[0].average - ctx.local_arch(&p).unwrap().value).abs() < 1e-14);
    }

    #[test]
    fn point_count_matches_hasse() {
        let e = WeierstrassCurve::from_i64([0, -1, 1, 0, 0]).unwrap();
        // a_p for 11a at small primes
        for (p, ap) in [(2u64, -2i64), (3, -1), (7, -2), (13, 4)] {
            assert_eq!(count_points_mod_p(&e, p) as i64, p as i64 + 1 - ap);
        }
    }
}
