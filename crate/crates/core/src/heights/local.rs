//! Local Néron–Tate heights, normalized so that λ_v ≈ ½ log|x|_v near O and
//! ĥ = Σ_v λ_v.

use crate::arith::algebraic::Place;
use crate::arith::factor::valuation;
use crate::dd::{ln_bigint_dd, Cdd, Dd};
use crate::elliptic::{BadPrime, CurvePoint, PeriodLattice, ReductionType, WeierstrassCurve};
use crate::error::{LabError, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Ratio};
use num_traits::Zero;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HeightMethod {
    QSeries,
    SigmaSeries,
    GoodReduction,
    Tate,
}

/// Component data at a multiplicative prime: m = ord_p(Δ) and the index i of
/// the component met by P.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TateLocalData {
    pub p: u64,
    pub m: u32,
    pub i: u32,
    /// ½B₂(i/m)·m·log p.
    pub value: f64,
}

/// B₂(x) = x² − x + 1/6 at a rational argument.
pub fn bernoulli2(x: Ratio<i64>) -> Ratio<i64> {
    x * x - x + Ratio::new(1, 6)
}

impl TateLocalData {
    pub fn new(p: u64, m: u32, i: u32) -> Self {
        let b = bernoulli2(Ratio::new(i as i64, m as i64));
        let value = 0.5 * (*b.numer() as f64 / *b.denom() as f64) * m as f64 * (p as f64).ln();
        TateLocalData { p, m, i, value }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalHeightReport {
    #[serde(serialize_with = "crate::ser::display")]
    pub place: Place,
    pub value: f64,
    pub method: HeightMethod,
    pub tate: Option<TateLocalData>,
}

/// Archimedean local height at a complex parameter z ∉ Λ by the q-product
///   λ(z) = −½B₂(t)log|q| − log|1−u| − Σ log|(1−qⁿu)(1−qⁿ/u)|,
/// with u = e^{2πiz/w1} and t = Im(z/w1)/Im τ ∈ [0, 1).
pub fn lambda_q_series(lat: &PeriodLattice, z: Cdd, tol: f64) -> Dd {
    let (zr, t) = lat.reduce_upper(z);
    let u = (Cdd::new(Dd::ZERO, Dd::TWO_PI) / lat.w1 * zr).exp();
    let ui = u.recip();
    let logq = lat.q.abs().ln();
    let b2 = t * t - t + Dd::ONE / 6.0;
    let mut acc = -(b2 * logq * 0.5) - (Cdd::ONE - u).abs().ln();
    let mut qn = Cdd::ONE;
    let qabs = lat.q.abs().to_f64();
    for n in 1..10_000 {
        qn = qn * lat.q;
        let term = ((Cdd::ONE - qn * u) * (Cdd::ONE - qn * ui)).abs().ln();
        acc -= term;
        // |qᵏu| ≤ |q|ᵏ and |qᵏ/u| ≤ |q|^{k−1}, and |log|1−w|| ≤ 2|w| for small w
        let tail = 4.0 * qabs.powi(n) / (1.0 - qabs);
        if tail < tol || qn.abs().to_f64() == 0.0 {
            break;
        }
    }
    acc
}

/// Same in double precision at reduced coordinates (s, t) ∈ R × [0, 1), for
/// bulk quadrature.
pub fn lambda_at_coords_f64(tau: Complex64, s: f64, t: f64) -> f64 {
    let q = (Complex64::new(0.0, 2.0 * std::f64::consts::PI) * tau).exp();
    let u = (Complex64::new(0.0, 2.0 * std::f64::consts::PI) * (s + t * tau)).exp();
    let ui = 1.0 / u;
    let b2 = t * t - t + 1.0 / 6.0;
    let mut acc = -0.5 * b2 * q.norm().ln() - (1.0 - u).norm().ln();
    let mut qn = Complex64::new(1.0, 0.0);
    for _ in 0..200 {
        qn *= q;
        acc -= ((1.0 - qn * u) * (1.0 - qn * ui)).norm().ln();
        if qn.norm() < 1e-18 * u.norm().min(ui.norm()) {
            break;
        }
    }
    acc
}

/// Laurent coefficients c_k of ℘(z) = z⁻² + Σ_{k≥2} c_k z^{2k−2}.
fn wp_laurent(g2: Dd, g3: Dd, kmax: usize) -> Vec<Dd> {
    let mut c = vec![Dd::ZERO; kmax + 1];
    if kmax >= 2 {
        c[2] = g2 / 20.0;
    }
    if kmax >= 3 {
        c[3] = g3 / 28.0;
    }
    for k in 4..=kmax {
        let mut s = Dd::ZERO;
        for j in 2..=k - 2 {
            s += c[j] * c[k - j];
        }
        c[k] = s * 3.0 / (((2 * k + 1) * (k - 3)) as f64);
    }
    c
}

/// Archimedean local height via the Weierstrass σ-function:
///   λ(z) = −log|e^{−zη(z)/2} σ(z) Δ^{1/12}|,
/// with log σ(z) = log z − Σ c_k z^{2k}/((2k−1)·2k) on the Voronoi cell of 0
/// and η the R-linear quasi-period map.
pub fn lambda_sigma_series(e: &WeierstrassCurve, lat: &PeriodLattice, z: Cdd) -> Dd {
    let mut zr = lat.reduce(z);
    let mut best = zr.abs();
    for i in -1..=1 {
        for j in -1..=1 {
            let w = zr - lat.w1 * Dd::from_i64(i) - lat.w2 * Dd::from_i64(j);
            if w.abs() < best {
                best = w.abs();
                zr = w;
            }
        }
    }
    let kmax = 400;
    let c = wp_laurent(lat.g2, lat.g3, kmax);
    let z2 = zr * zr;
    let mut zp = z2;
    let mut series = Cdd::ZERO;
    for k in 2..=kmax {
        zp = zp * z2;
        let term = zp * (c[k] / (((2 * k - 1) * 2 * k) as f64));
        series += term;
        if k > 8 && term.abs().to_f64() < 1e-34 {
            break;
        }
    }
    let log_abs_sigma = zr.abs().ln() - series.re;
    let (s, t) = lat.reduced_coords(zr);
    let eta = lat.eta_w1 * s + lat.eta_w2 * t;
    let half_z_eta = (zr * eta).re * 0.5;
    half_z_eta - log_abs_sigma - ln_bigint_dd(&e.disc) / 12.0
}

fn ord_rational(x: &BigRational, p: u64) -> i64 {
    if x.is_zero() {
        return i64::MAX;
    }
    valuation(x.numer(), p) as i64 - valuation(x.denom(), p) as i64
}

pub fn local_height_arch(e: &WeierstrassCurve, lat: &PeriodLattice, p: &CurvePoint, tol: f64) -> Result<LocalHeightReport> {
    if p.is_infinity() {
        return Err(LabError::Pole);
    }
    let z = crate::elliptic::elliptic_log(e, lat, p)?;
    Ok(LocalHeightReport {
        place: Place::Archimedean,
        value: lambda_q_series(lat, z, tol).to_f64(),
        method: HeightMethod::QSeries,
        tate: None,
    })
}

/// Non-archimedean local height at p on a model minimal at p. Good and
/// multiplicative reduction are supported; at a multiplicative prime a point
/// on the singular component gets the Tate correction with i =
/// min(ord_p(2y + a1x + a3), m/2).
pub fn local_height_nonarch(e: &WeierstrassCurve, p: &CurvePoint, prime: u64) -> Result<LocalHeightReport> {
    let (x, y) = match p {
        CurvePoint::Infinity => return Err(LabError::Pole),
        CurvePoint::Affine(x, y) => (x, y),
    };
    e.check(p)?;
    let red = e.reduction_at(prime);
    let logp = (prime as f64).ln();
    let ox = ord_rational(x, prime);
    let base = 0.5 * (-ox).max(0) as f64 * logp;
    match red {
        ReductionType::Good => Ok(LocalHeightReport {
            place: Place::Finite(prime),
            value: base,
            method: HeightMethod::GoodReduction,
            tate: None,
        }),
        ReductionType::Additive => Err(LabError::UnsupportedReduction { p: prime, kind: red.to_string() }),
        ReductionType::SplitMultiplicative | ReductionType::NonsplitMultiplicative => {
            let m = valuation(&e.disc, prime);
            let q = |n: &BigInt| BigRational::from_integer(n.clone());
            let two = BigRational::from_integer(2.into());
            let three = BigRational::from_integer(3.into());
            let psi2 = &two * y + q(&e.a1) * x + q(&e.a3);
            let fx = &three * x * x + &two * q(&e.a2) * x + q(&e.a4) - q(&e.a1) * y;
            let singular = ox >= 0 && ord_rational(&psi2, prime) > 0 && ord_rational(&fx, prime) > 0;
            let i = if singular {
                let v = ord_rational(&psi2, prime);
                if v.saturating_mul(2) >= m as i64 {
                    if m % 2 == 1 {
                        return Err(LabError::inv(format!("component index beyond m/2 at p = {prime} with odd m = {m}")));
                    }
                    m / 2
                } else {
                    v as u32
                }
            } else {
                0
            };
            let tate = TateLocalData::new(prime, m, i);
            Ok(LocalHeightReport {
                place: Place::Finite(prime),
                value: base + tate.value,
                method: HeightMethod::Tate,
                tate: Some(tate),
            })
        }
    }
}

/// Primes that can carry a nonzero local height for P: bad primes and
/// primes in the denominator of x(P).
pub fn support_primes(bad: &[BadPrime], p: &CurvePoint) -> Vec<u64> {
    let mut out: Vec<u64> = bad.iter().map(|b| b.p).collect();
    if let Some(x) = p.x() {
        let d = x.denom().magnitude().clone();
        for q in crate::arith::factor::factor(&d).small() {
            out.push(q.0);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::periods_and_log;

    #[test]
    fn two_torsion_on_the_singular_component() {
        // 2y + a1x + a3 = 0 exactly, so its valuation is infinite
        let e = WeierstrassCurve::from_i64([-1, 0, 0, -1, 0]).unwrap();
        let p = CurvePoint::from_i64(0, 0);
        for b in e.bad_primes() {
            let r = local_height_nonarch(&e, &p, b.p).unwrap();
            if let Some(t) = r.tate {
                assert!(t.i <= t.m / 2);
            }
        }
        let h = crate::heights::EllipticContext::new(e).unwrap().height(&p).unwrap();
        assert!(h.abs() < 1e-12, "{h}");
    }

    #[test]
    fn eleven_a_torsion_arch_height() {
        let e = WeierstrassCurve::from_i64([0, -1, 1, 0, 0]).unwrap();
        let (lat, z) = periods_and_log(&e, &CurvePoint::from_i64(0, 0)).unwrap();
        let lq = lambda_q_series(&lat, z, 1e-30).to_f64();
        assert!((lq + 11f64.ln() / 12.0).abs() < 1e-14, "{lq}");
        let ls = lambda_sigma_series(&e, &lat, z).to_f64();
        assert!((ls - lq).abs() < 1e-12, "{ls} vs {lq}");
    }

    #[test]
    fn two_routes_agree_at_generic_points() {
        let e = WeierstrassCurve::from_i64([0, 0, 1, -1, 0]).unwrap();
        let lat = PeriodLattice::new(&e).unwrap();
        for (s, t) in [(0.1, 0.2), (0.37, -0.41), (-0.49, 0.05), (0.25, 0.5)] {
            let z = lat.omega1 * s + lat.omega2 * t;
            let a = lambda_q_series(&lat, z, 1e-30).to_f64();
            let b = lambda_sigma_series(&e, &lat, z).to_f64();
            assert!((a - b).abs() < 1e-12, "({s},{t}): {a} vs {b}");
            let (rs, rt) = lat.reduced_coords(z);
            let rt = rt.to_f64() - rt.to_f64().floor();
            let c = lambda_at_coords_f64(lat.tau.to_c64(), rs.to_f64(), rt);
            assert!((a - c).abs() < 1e-9);
        }
    }

    #[test]
    fn nonarch_cases() {
        let e = WeierstrassCurve::from_i64([0, 0, 1, -1, 0]).unwrap();
        let p = CurvePoint::from_i64(0, 0);
        assert_eq!(local_height_nonarch(&e, &p, 2).unwrap().value, 0.0);
        let p5 = e.mul(&p, 5).unwrap();
        let v = local_height_nonarch(&e, &p5, 2).unwrap().value;
        assert!((v - 2f64.ln()).abs() < 1e-15);
        let t = local_height_nonarch(&e, &p, 37).unwrap();
        assert!((t.value - 37f64.ln() / 12.0).abs() < 1e-15);
        assert_eq!(local_height_nonarch(&e, &CurvePoint::Infinity, 2), Err(LabError::Pole));
        let cong = WeierstrassCurve::from_i64([0, 0, 0, -1, 0]).unwrap();
        assert!(matches!(
            local_height_nonarch(&cong, &CurvePoint::from_i64(0, 0), 2),
            Err(LabError::UnsupportedReduction { .. })
        ));
    }

    #[test]
    fn bernoulli_sum_identity() {
        for m in 1..=50i64 {
            let s: Ratio<i64> = (0..m).map(|i| bernoulli2(Ratio::new(i, m))).sum();
            assert_eq!(s, Ratio::new(1, 6 * m));
        }
    }
}
