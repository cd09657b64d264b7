//! Denominator bounds for torsion points: a point of exact order N is
//! p-integral unless N is a power of p, and for N = pⁿ with x = a/D² one has
//! ord_p(D) ≤ 1/(pⁿ − pⁿ⁻¹).

use crate::arith::factor::valuation;
use crate::arith::functions::distinct_primes;
use crate::arith::poly::IntPolynomial;
use crate::elliptic::division::DivisionTower;
use crate::elliptic::torsion::rational_torsion;
use crate::elliptic::{CurvePoint, WeierstrassCurve};
use crate::error::Result;
use num_rational::{BigRational, Ratio};
use num_traits::Zero;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CasselsPart {
    /// N is not a power of p: coordinates are p-integral.
    A,
    /// N = pⁿ: bounded denominator.
    B,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CasselsVerdict {
    /// "rational" for an exact rational torsion point, "f_N" for a root class
    /// of the primitive division polynomial.
    pub source: String,
    pub point: Option<CurvePoint>,
    /// ord_p(x), exact.
    #[serde(serialize_with = "crate::ser::display")]
    pub ord_x: Ratio<i64>,
    /// Number of roots with this valuation (1 for rational points).
    pub multiplicity: usize,
    /// Upper bound for ord_p(D) in part B, 0 in part A.
    #[serde(serialize_with = "crate::ser::display")]
    pub bound: Ratio<i64>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CasselsReport {
    pub n: u64,
    pub p: u64,
    pub part: CasselsPart,
    #[serde(serialize_with = "crate::ser::display")]
    pub bound: Ratio<i64>,
    pub verdicts: Vec<CasselsVerdict>,
    pub violations: usize,
}

fn ord_q(x: &BigRational, p: u64) -> Option<i64> {
    if x.is_zero() {
        None
    } else {
        Some(valuation(x.numer(), p) as i64 - valuation(x.denom(), p) as i64)
    }
}

/// p-adic valuations of the roots of f with multiplicities, from the lower
/// convex hull of (i, ord_p(c_i)). A zero root is reported with valuation
/// `i64::MAX`.
pub fn newton_polygon_valuations(f: &IntPolynomial, p: u64) -> Vec<(Ratio<i64>, usize)> {
    let pts: Vec<(i64, i64)> = f
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i as i64, valuation(c, p) as i64))
        .collect();
    let mut out = Vec::new();
    let low = pts[0].0;
    if low > 0 {
        out.push((Ratio::from_integer(i64::MAX), low as usize));
    }
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b if it lies on or above the segment a–pt
            if (b.1 - a.1) * (pt.0 - a.0) >= (pt.1 - a.1) * (b.0 - a.0) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        let slope = Ratio::new(b.1 - a.1, b.0 - a.0);
        out.push((-slope, (b.0 - a.0) as usize));
    }
    out
}

fn prime_power_exponent(n: u64, p: u64) -> Option<u32> {
    let mut m = n;
    let mut k = 0;
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    (m == 1 && k > 0).then_some(k)
}

pub fn cassels_check(e: &WeierstrassCurve, n: u64, p: u64) -> Result<CasselsReport> {
    let pk = prime_power_exponent(n, p);
    let part = if pk.is_some() { CasselsPart::B } else { CasselsPart::A };
    let bound = match pk {
        Some(k) => {
            let pn = p.pow(k) as i64;
            Ratio::new(1, pn - pn / p as i64)
        }
        None => Ratio::from_integer(0),
    };
    // ord_p(D) = max(0, −ord_p(x)/2)
    let denom_ok = |ox: Ratio<i64>| {
        let d = if ox < Ratio::from_integer(0) { -ox / 2 } else { Ratio::from_integer(0) };
        d <= bound
    };
    let mut verdicts = Vec::new();
    for (pt, ord) in rational_torsion(e)? {
        if ord != n {
            continue;
        }
        let (x, y) = (pt.x().unwrap(), pt.y().unwrap());
        let ox = ord_q(x, p).map_or(Ratio::from_integer(i64::MAX), Ratio::from_integer);
        let oy = ord_q(y, p).map_or(i64::MAX, |v| v);
        let pass = match part {
            CasselsPart::A => ox >= Ratio::from_integer(0) && oy >= 0,
            CasselsPart::B => denom_ok(ox),
        };
        verdicts.push(CasselsVerdict {
            source: "rational".into(),
            point: Some(pt.clone()),
            ord_x: ox,
            multiplicity: 1,
            bound,
            pass,
        });
    }
    if n >= 2 {
        let f = DivisionTower::new(e).primitive(n)?;
        for (v, mult) in newton_polygon_valuations(&f, p) {
            let pass = match part {
                CasselsPart::A => v >= Ratio::from_integer(0),
                CasselsPart::B => denom_ok(v),
            };
            verdicts.push(CasselsVerdict { source: "f_N".into(), point: None, ord_x: v, multiplicity: mult, bound, pass });
        }
    }
    let violations = verdicts.iter().filter(|v| !v.pass).count();
    Ok(CasselsReport { n, p, part, bound, verdicts, violations })
}

/// Every (N, p) pair with p ranging over the primes of N and of the
/// discriminant plus 2, 3, 5, 7.
pub fn cassels_sweep(e: &WeierstrassCurve, n_max: u64) -> Result<Vec<CasselsReport>> {
    let mut out = Vec::new();
    let mut base: Vec<u64> = vec![2, 3, 5, 7];
    base.extend(e.bad_primes().iter().map(|b| b.p));
    for n in 2..=n_max {
        let mut ps = base.clone();
        ps.extend(distinct_primes(n));
        ps.sort_unstable();
        ps.dedup();
        for p in ps {
            out.push(cassels_check(e, n, p)?);
        }
    }
    Ok(out)
}
