//! Roots of unity against a fixed algebraic number: S-integrality via
//! cyclotomic resultants, the place decomposition of `log|Phi_n(alpha)|`,
//! local averages, the Everest–Ward limit and the small-height family
//! `x^(2^n)(x - 2) - 1`.

use crate::arith::algebraic::{AlgebraicNumber, Place, PlaceSet};
use crate::arith::cyclotomic::cyclotomic;
use crate::arith::factor::{factor, factor_with_budget, valuation};
use crate::arith::functions::phi;
use crate::arith::modp::gcd_degree_mod;
use crate::arith::poly::IntPolynomial;
use crate::arith::resultant::{resultant, resultant_linear};
use crate::arith::roots::log_mahler_measure;
use crate::arith::zfactor::is_irreducible;
use crate::dd::ln_bigint;
use crate::error::{LabError, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

/// Rho iterations per attempt when splitting resultants during scans.
pub const SCAN_RHO_BUDGET: u64 = 20_000;

const ROOT_OF_UNITY_MSG: &str = "alpha is zero or a root of unity: positive height required";

/// h(alpha) = (1/d)(log|lead| + sum log+ |root|), exactly 0 for roots of unity.
pub fn naive_height(alpha: &AlgebraicNumber) -> Result<f64> {
    if alpha.is_zero() {
        return Err(LabError::pre("height of zero"));
    }
    if alpha.is_root_of_unity() {
        return Ok(0.0);
    }
    if let Some(q) = alpha.as_rational() {
        let m = q.numer().abs().max(q.denom().abs());
        return Ok(ln_bigint(&m));
    }
    Ok(log_mahler_measure(alpha.minpoly())? / alpha.degree() as f64)
}

fn require_positive_height(alpha: &AlgebraicNumber) -> Result<()> {
    if alpha.is_zero() || alpha.is_root_of_unity() {
        return Err(LabError::pre(ROOT_OF_UNITY_MSG));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CollisionPrime {
    #[serde(serialize_with = "crate::ser::display")]
    pub prime: BigUint,
    /// Degree of gcd(f_alpha mod p, Phi_n mod p).
    pub witness_degree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SIntegralityVerdict {
    pub n: u64,
    #[serde(serialize_with = "crate::ser::display")]
    pub resultant: BigInt,
    pub collision_primes: Vec<CollisionPrime>,
    /// Composite part of |Res| that resisted factorization; all of its prime
    /// factors are collision primes outside S.
    #[serde(serialize_with = "crate::ser::display_opt")]
    pub unfactored: Option<BigUint>,
    pub integral: bool,
}

impl SIntegralityVerdict {
    pub fn prime_list(&self) -> Vec<String> {
        let mut v: Vec<String> = self.collision_primes.iter().map(|c| c.prime.to_string()).collect();
        if let Some(c) = &self.unfactored {
            v.push(format!("[{c}]"));
        }
        v
    }
}

/// Collision primes of `alpha` with the primitive n-th roots of unity and the
/// S-integrality verdict. Since `Phi_n` is monic, `p | Res(f_alpha, Phi_n)`
/// exactly when the two reductions share a factor mod p, so the prime
/// support of the resultant is the collision set; each prime is confirmed by
/// its gcd witness.
pub fn s_integrality(alpha: &AlgebraicNumber, s: &PlaceSet, n: u64, budget: u64) -> Result<SIntegralityVerdict> {
    require_positive_height(alpha)?;
    if n == 0 {
        return Err(LabError::pre("root of unity order must be positive"));
    }
    let phin = cyclotomic(n);
    let res = match alpha.as_rational() {
        Some(q) => resultant_linear(q.numer(), q.denom(), &phin),
        None => resultant(alpha.minpoly(), &phin)?,
    };
    if res.is_zero() {
        return Err(LabError::pre(ROOT_OF_UNITY_MSG));
    }
    let integral = s.strip(&res).is_one();
    let abs = res.abs().to_biguint().unwrap();
    let pf = factor_with_budget(&abs, budget);
    let mut collision_primes = Vec::with_capacity(pf.factors.len());
    for (p, _) in &pf.factors {
        let w = gcd_degree_mod(alpha.minpoly(), &phin, &BigInt::from(p.clone()));
        if w == 0 {
            return Err(LabError::inv(format!("prime {p} divides Res but has no gcd witness (n = {n})")));
        }
        collision_primes.push(CollisionPrime { prime: p.clone(), witness_degree: w });
    }
    Ok(SIntegralityVerdict { n, resultant: res, collision_primes, unfactored: pf.cofactor, integral })
}

/// Verdicts for every n in `ns`, in the order given.
pub fn s_integral_scan(alpha: &AlgebraicNumber, s: &PlaceSet, ns: &[u64]) -> Result<Vec<SIntegralityVerdict>> {
    require_positive_height(alpha)?;
    ns.par_iter().map(|&n| s_integrality(alpha, s, n, SCAN_RHO_BUDGET)).collect()
}

/// The n with integral verdicts.
pub fn integral_orders(verdicts: &[SIntegralityVerdict]) -> Vec<u64> {
    verdicts.iter().filter(|v| v.integral).map(|v| v.n).collect()
}

fn rational_parts(alpha: &BigRational) -> Result<(BigInt, BigInt)> {
    let (a, b) = (alpha.numer().clone(), alpha.denom().clone());
    if a.is_zero() || (a.abs() == b.abs()) {
        return Err(LabError::pre(ROOT_OF_UNITY_MSG));
    }
    Ok((a, b))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiniteContribution {
    #[serde(serialize_with = "crate::ser::display")]
    pub prime: BigUint,
    /// ord_p(Phi_n(alpha)); the contribution is `-ord * log p`.
    pub ord: i64,
    pub log_contribution: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlaceDecomposition {
    pub n: u64,
    /// |Phi~_n(a, b)|, the numerator of the archimedean term.
    #[serde(serialize_with = "crate::ser::display")]
    pub arch_numerator: BigInt,
    /// |b|^phi(n), the denominator of the archimedean term.
    #[serde(serialize_with = "crate::ser::display")]
    pub arch_denominator: BigInt,
    pub arch_log: f64,
    pub finite: Vec<FiniteContribution>,
    /// Composite divisor of the numerator left unsplit; enters with ord 1.
    #[serde(serialize_with = "crate::ser::display_opt")]
    pub unfactored: Option<BigUint>,
    /// Exact product formula: prod p^ord (times the cofactor) equals the
    /// archimedean rational.
    pub total_is_zero: bool,
    pub total_float: f64,
}

/// `log|Phi_n(alpha)|` split over all places for rational alpha = a/b.
pub fn place_decomposition(alpha: &BigRational, n: u64) -> Result<PlaceDecomposition> {
    place_decomposition_with_budget(alpha, n, 200_000)
}

pub fn place_decomposition_with_budget(alpha: &BigRational, n: u64, budget: u64) -> Result<PlaceDecomposition> {
    let (a, b) = rational_parts(alpha)?;
    if n == 0 {
        return Err(LabError::pre("order must be positive"));
    }
    let ph = phi(n) as usize;
    let num = cyclotomic(n).eval_homogeneous(&a, &b).abs();
    let den = num_traits::pow(b.abs(), ph);
    let pf = factor_with_budget(&num.to_biguint().unwrap(), budget);
    let mut finite: Vec<FiniteContribution> = pf
        .factors
        .iter()
        .map(|(p, e)| FiniteContribution {
            prime: p.clone(),
            ord: *e as i64,
            log_contribution: -(*e as f64) * ln_bigint(&BigInt::from(p.clone())),
        })
        .collect();
    let bf = factor(&b.abs().to_biguint().unwrap());
    for (p, e) in &bf.factors {
        let ord = -((*e as i64) * ph as i64);
        finite.push(FiniteContribution {
            prime: p.clone(),
            ord,
            log_contribution: -(ord as f64) * ln_bigint(&BigInt::from(p.clone())),
        });
    }
    finite.sort_by(|x, y| x.prime.cmp(&y.prime));
    let mut pos = BigUint::one();
    let mut neg = BigUint::one();
    for c in &finite {
        let pk = num_traits::pow(c.prime.clone(), c.ord.unsigned_abs() as usize);
        if c.ord > 0 {
            pos *= pk;
        } else {
            neg *= pk;
        }
    }
    if let Some(c) = &pf.cofactor {
        pos *= c;
    }
    let total_is_zero = BigInt::from(pos) == num && BigInt::from(neg) == den;
    let arch_log = ln_bigint(&num) - ph as f64 * ln_bigint(&b);
    let mut total_float = arch_log + finite.iter().map(|c| c.log_contribution).sum::<f64>();
    if let Some(c) = &pf.cofactor {
        total_float -= ln_bigint(&BigInt::from(c.clone()));
    }
    Ok(PlaceDecomposition {
        n,
        arch_numerator: num,
        arch_denominator: den,
        arch_log,
        finite,
        unfactored: pf.cofactor,
        total_is_zero,
        total_float,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalAverage {
    pub n: u64,
    pub value: f64,
    pub target: f64,
    /// ord_p(Phi_n(alpha)) at a finite place.
    pub ord: Option<i64>,
}

/// `(1/phi(n)) log|Phi_n(alpha)|_v` against `max(0, log|alpha|_v)`.
pub fn local_average_series(alpha: &BigRational, v: Place, ns: &[u64]) -> Result<Vec<LocalAverage>> {
    let (a, b) = rational_parts(alpha)?;
    let target = match v {
        Place::Archimedean => (ln_bigint(&a) - ln_bigint(&b)).max(0.0),
        Place::Finite(p) => {
            let oa = valuation(&a, p) as f64;
            let ob = valuation(&b, p) as f64;
            ((ob - oa) * (p as f64).ln()).max(0.0)
        }
    };
    ns.par_iter()
        .map(|&n| {
            if n == 0 {
                return Err(LabError::pre("order must be positive"));
            }
            let ph = phi(n);
            let val = cyclotomic(n).eval_homogeneous(&a, &b);
            Ok(match v {
                Place::Archimedean => LocalAverage {
                    n,
                    value: (ln_bigint(&val) - ph as f64 * ln_bigint(&b)) / ph as f64,
                    target,
                    ord: None,
                },
                Place::Finite(p) => {
                    let ord = valuation(&val, p) as i64 - ph as i64 * valuation(&b, p) as i64;
                    LocalAverage { n, value: -(ord as f64) * (p as f64).ln() / ph as f64, target, ord: Some(ord) }
                }
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct MahlerReport {
    #[serde(serialize_with = "crate::ser::display")]
    pub f: IntPolynomial,
    pub mahler: f64,
    /// |Res(F, x^n - 1)| for n = 1..=n_max.
    #[serde(serialize_with = "crate::ser::display_vec")]
    pub deltas: Vec<BigInt>,
    pub normalized: Vec<f64>,
    /// max_n n * |(1/n) log Delta_n - m(F)|.
    pub fitted_c: f64,
}

fn is_cyclotomic_poly(f: &IntPolynomial) -> bool {
    let a = AlgebraicNumber::from_minpoly(f, num_complex::Complex64::new(0.0, 0.0));
    a.map(|a| a.is_root_of_unity()).unwrap_or(false)
}

pub fn everest_ward(f: &IntPolynomial, n_max: u64) -> Result<MahlerReport> {
    if f.deg() == 0 || !f.is_monic() {
        return Err(LabError::pre("F must be monic of positive degree"));
    }
    if *f == IntPolynomial::x() || is_cyclotomic_poly(f) {
        return Err(LabError::pre("excluded by hypothesis: F is x or cyclotomic"));
    }
    if !is_irreducible(f) {
        return Err(LabError::pre("F must be irreducible"));
    }
    if n_max == 0 {
        return Err(LabError::pre("range must be positive"));
    }
    let mahler = log_mahler_measure(f)?;
    let deltas: Vec<BigInt> = (1..=n_max as usize)
        .into_par_iter()
        .map(|n| resultant(f, &IntPolynomial::x_pow_minus_one(n)).map(|r| r.abs()))
        .collect::<Result<_>>()?;
    let normalized: Vec<f64> = deltas.iter().enumerate().map(|(i, d)| ln_bigint(d) / (i + 1) as f64).collect();
    let fitted_c = normalized
        .iter()
        .enumerate()
        .map(|(i, v)| (i + 1) as f64 * (v - mahler).abs())
        .fold(0.0, f64::max);
    Ok(MahlerReport { f: f.clone(), mahler, deltas, normalized, fitted_c })
}

/// All m <= m_max with Res(f_alpha, Phi_m) = +-1.
pub fn cyclotomic_unit_scan(alpha: &AlgebraicNumber, m_max: u64) -> Result<Vec<u64>> {
    if !alpha.is_algebraic_integer() {
        return Err(LabError::pre("alpha must be an algebraic integer"));
    }
    require_positive_height(alpha)?;
    let hits: Vec<Option<u64>> = (1..=m_max)
        .into_par_iter()
        .map(|m| resultant(alpha.minpoly(), &cyclotomic(m)).map(|r| r.abs().is_one().then_some(m)))
        .collect::<Result<_>>()?;
    Ok(hits.into_iter().flatten().collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct SmallPointFamily {
    pub n: u32,
    #[serde(serialize_with = "crate::ser::display")]
    pub f_n: IntPolynomial,
    /// Whether `f_n(x + 1)` satisfies Eisenstein's criterion at 2.
    pub eisenstein_at_2: bool,
    /// Irreducibility over the rationals by modular factorization;
    /// absent above the factorization cap.
    pub irreducible: Option<bool>,
    #[serde(serialize_with = "crate::ser::display")]
    pub f_at_0: BigInt,
    #[serde(serialize_with = "crate::ser::display")]
    pub f_at_2: BigInt,
    /// h(beta_n) = m(f_n) / deg f_n; absent above the root-finding cap.
    pub h_estimate: Option<f64>,
}

pub const SMALL_POINT_ROOT_CAP: u32 = 10;
pub const SMALL_POINT_FACTOR_CAP: u32 = 8;

/// `f(x + 1)` Eisenstein at p.
pub fn eisenstein_shifted(f: &IntPolynomial, p: u64) -> bool {
    let g = f.taylor_shift(&BigInt::one());
    let pb = BigInt::from(p);
    let n = g.deg();
    if n == 0 || (g.lead() % &pb).is_zero() {
        return false;
    }
    let lower_ok = (0..n).all(|i| (g.coeff(i) % &pb).is_zero());
    lower_ok && !(g.coeff(0) % (&pb * &pb)).is_zero()
}

pub fn small_point_polynomial(n: u32) -> IntPolynomial {
    let k = 1usize << n;
    let mut c = vec![BigInt::zero(); k + 2];
    c[0] = BigInt::from(-1);
    c[k] = BigInt::from(-2);
    c[k + 1] = BigInt::one();
    IntPolynomial::new(c)
}

pub fn small_point_family(n_max: u32) -> Result<Vec<SmallPointFamily>> {
    if n_max == 0 {
        return Err(LabError::pre("n_max must be at least 1"));
    }
    (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let f = small_point_polynomial(n);
            let h = if n <= SMALL_POINT_ROOT_CAP {
                Some(log_mahler_measure(&f)? / f.deg() as f64)
            } else {
                None
            };
            Ok(SmallPointFamily {
                n,
                eisenstein_at_2: eisenstein_shifted(&f, 2),
                irreducible: (n <= SMALL_POINT_FACTOR_CAP).then(|| is_irreducible(&f)),
                f_at_0: f.eval(&BigInt::zero()),
                f_at_2: f.eval(&BigInt::from(2)),
                f_n: f,
                h_estimate: h,
            })
        })
        .collect()
}

/// Multiplicative order of a/b modulo p (p coprime to ab).
pub fn order_mod_p(a: &BigInt, b: &BigInt, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let am = (a % &pb + &pb) % &pb;
    let bm = (b % &pb + &pb) % &pb;
    if am.is_zero() || bm.is_zero() {
        return None;
    }
    let binv = bm.modpow(&BigInt::from(p - 2), &pb);
    let x = (am * binv % &pb).to_u64().unwrap();
    crate::arith::functions::multiplicative_order(x, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn heights() {
        assert!((naive_height(&AlgebraicNumber::from_integer(2)).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!((naive_height(&AlgebraicNumber::from_fraction(1, 3)).unwrap() - 3f64.ln()).abs() < 1e-15);
        assert!(naive_height(&AlgebraicNumber::from_integer(0)).is_err());
        assert_eq!(naive_height(&AlgebraicNumber::from_integer(-1)).unwrap(), 0.0);
    }

    #[test]
    fn scan_examples() {
        let two = AlgebraicNumber::from_integer(2);
        let s = PlaceSet::archimedean_only();
        let v1 = s_integrality(&two, &s, 1, 1000).unwrap();
        assert!(v1.integral && v1.collision_primes.is_empty());
        let v5 = s_integrality(&two, &s, 5, 1000).unwrap();
        assert!(!v5.integral);
        assert_eq!(v5.collision_primes, vec![CollisionPrime { prime: BigUint::from(31u32), witness_degree: 1 }]);
    }

    #[test]
    fn root_of_unity_rejected() {
        let z3 = AlgebraicNumber::from_minpoly(&cyclotomic(3), num_complex::Complex64::new(-0.5, 0.87)).unwrap();
        let e = s_integrality(&z3, &PlaceSet::archimedean_only(), 2, 10).unwrap_err();
        assert!(matches!(e, LabError::Precondition(_)));
    }

    #[test]
    fn decomposition_examples() {
        let d = place_decomposition(&q(2, 1), 5).unwrap();
        assert_eq!(d.arch_numerator, BigInt::from(31));
        assert_eq!(d.finite.len(), 1);
        assert!(d.total_is_zero);
        let d = place_decomposition(&q(1, 2), 3).unwrap();
        assert_eq!(d.arch_numerator, BigInt::from(7));
        assert_eq!(d.arch_denominator, BigInt::from(4));
        let ords: Vec<(u64, i64)> = d.finite.iter().map(|c| (c.prime.to_u64().unwrap(), c.ord)).collect();
        assert_eq!(ords, vec![(2, -2), (7, 1)]);
        assert!(d.total_is_zero && d.total_float.abs() < 1e-12);
        assert!(place_decomposition(&q(-1, 1), 3).is_err());
    }

    #[test]
    fn local_average_examples() {
        let r = local_average_series(&q(2, 1), Place::Archimedean, &[100]).unwrap();
        assert!((r[0].value - 2f64.ln()).abs() < 0.2);
        let r = local_average_series(&q(1, 2), Place::Finite(2), &[3, 7, 12]).unwrap();
        for x in r {
            assert!((x.value - 2f64.ln()).abs() < 1e-14 && (x.target - 2f64.ln()).abs() < 1e-14);
        }
    }

    #[test]
    fn everest_ward_linear() {
        let r = everest_ward(&IntPolynomial::from_i64(&[-2, 1]), 20).unwrap();
        assert_eq!(r.deltas[0], BigInt::one());
        assert_eq!(r.deltas[9], BigInt::from(1023));
        assert!(everest_ward(&cyclotomic(7), 5).is_err());
        assert!(everest_ward(&IntPolynomial::x(), 5).is_err());
    }

    #[test]
    fn unit_scan() {
        assert_eq!(cyclotomic_unit_scan(&AlgebraicNumber::from_integer(2), 100).unwrap(), vec![1]);
        let b = AlgebraicNumber::from_minpoly(&IntPolynomial::from_i64(&[-1, 0, -2, 1]), num_complex::Complex64::new(2.2, 0.0)).unwrap();
        assert!(!cyclotomic_unit_scan(&b, 1).unwrap().contains(&1));
        assert!(cyclotomic_unit_scan(&AlgebraicNumber::from_fraction(1, 2), 3).is_err());
    }

    #[test]
    fn small_points() {
        let fam = small_point_family(3).unwrap();
        assert_eq!(fam[0].f_n, IntPolynomial::from_i64(&[-1, 0, -2, 1]));
        for s in &fam {
            assert_eq!(s.irreducible, Some(true));
            assert_eq!(s.f_at_0.abs(), BigInt::one());
            assert_eq!(s.f_at_2.abs(), BigInt::one());
        }
        assert!(fam[2].h_estimate.unwrap() < fam[0].h_estimate.unwrap());
    }
}
