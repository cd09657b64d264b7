//! Equidistribution of roots of unity on the circle: coprime counts in
//! progressions, arc discrepancy, angular gaps, Jensen quadrature and the
//! three-part split of `(1/phi(n)) sum log|sigma(zeta_n) - alpha|`.

use crate::arith::algebraic::AlgebraicNumber;
use crate::arith::functions::{arith_functions, distinct_primes, phi};
use crate::arith::roots::roots_dd;
use crate::dd::{Cdd, Dd};
use crate::error::{LabError, Result};
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

/// `#{a in (c, d] : gcd(a, N) = 1, a = b mod Q}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CountQuery {
    pub n: u64,
    pub q: u64,
    pub b: i64,
    pub c: f64,
    pub d: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CountResult {
    pub count: i64,
    pub main_term: f64,
    pub error: f64,
    /// d(N), the number of divisors of N.
    pub bound: u64,
}

fn validate(n: u64, q: u64, b: i64) -> Result<()> {
    if n == 0 || q == 0 {
        return Err(LabError::pre("N and Q must be positive"));
    }
    if n % q != 0 {
        return Err(LabError::pre(format!("Q = {q} does not divide N = {n}")));
    }
    if (b.rem_euclid(q as i64) as u64).gcd(&q) != 1 {
        return Err(LabError::pre(format!("gcd(b, Q) != 1 for b = {b}, Q = {q}")));
    }
    Ok(())
}

fn inv_mod_i(a: i64, m: i64) -> i64 {
    let e = a.extended_gcd(&m);
    e.x.rem_euclid(m)
}

/// Exact count over the integer window (lo, hi] by inclusion–exclusion over
/// the primes of N not dividing Q.
pub fn count_in_window(n: u64, q: u64, b: i64, lo: i64, hi: i64) -> i64 {
    if hi <= lo {
        return 0;
    }
    let primes: Vec<i64> = distinct_primes(n).into_iter().filter(|p| q % p != 0).map(|p| p as i64).collect();
    let qi = q as i64;
    let mut total = 0i64;
    for mask in 0u32..(1 << primes.len()) {
        let mut d = 1i64;
        for (i, p) in primes.iter().enumerate() {
            if mask >> i & 1 == 1 {
                d *= p;
            }
        }
        let m = qi * d;
        // r = b mod Q, r = 0 mod d
        let r = if qi == 1 { 0 } else { (b.rem_euclid(qi) * d % m * inv_mod_i(d % qi, qi)) % m };
        let cnt = (hi - r).div_euclid(m) - (lo - r).div_euclid(m);
        if mask.count_ones() % 2 == 0 {
            total += cnt;
        } else {
            total -= cnt;
        }
    }
    total
}

pub fn coprime_progression_count(query: &CountQuery) -> Result<CountResult> {
    let CountQuery { n, q, b, c, d } = *query;
    validate(n, q, b)?;
    if !(c <= d) {
        return Err(LabError::pre("interval must satisfy c <= d"));
    }
    let count = count_in_window(n, q, b, c.floor() as i64, d.floor() as i64);
    let main_term = phi(n) as f64 / (n as f64 * phi(q) as f64) * (d - c);
    Ok(CountResult { count, main_term, error: count as f64 - main_term, bound: arith_functions(n).d })
}

/// Half-open arc (theta1, theta2] with 0 < theta2 - theta1 <= 2 pi.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ArcInterval {
    pub theta1: f64,
    pub theta2: f64,
}

impl ArcInterval {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self> {
        let len = theta2 - theta1;
        if !(len > 0.0 && len <= std::f64::consts::TAU) {
            return Err(LabError::pre("arc length must lie in (0, 2 pi]"));
        }
        Ok(ArcInterval { theta1, theta2 })
    }

    pub fn measure(&self) -> f64 {
        (self.theta2 - self.theta1) / std::f64::consts::TAU
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub n: u64,
    pub arc: ArcInterval,
    pub count: i64,
    pub expected: f64,
    pub error: f64,
    /// d(n): the proven bound on |count - expected|.
    pub bound: u64,
}

impl DiscrepancyReport {
    pub fn within_bound(&self) -> bool {
        self.error.abs() <= self.bound as f64 + 1e-9
    }
}

/// `floor(n theta / 2 pi)` in double-double.
fn turns_floor(n: u64, theta: f64) -> i64 {
    let t = Dd::from_f64(theta) * Dd::from_f64(n as f64) / Dd::TWO_PI;
    t.floor().to_f64() as i64
}

/// Number of primitive n-th roots of unity e^(2 pi i a/n) in the arc.
pub fn arc_count(n: u64, arc: &ArcInterval) -> i64 {
    count_in_window(n, 1, 0, turns_floor(n, arc.theta1), turns_floor(n, arc.theta2))
}

pub fn arc_discrepancy(n: u64, arcs: &[ArcInterval]) -> Result<Vec<DiscrepancyReport>> {
    if n == 0 {
        return Err(LabError::pre("n must be positive"));
    }
    let ph = phi(n) as f64;
    let bound = arith_functions(n).d;
    Ok(arcs
        .iter()
        .map(|arc| {
            let count = arc_count(n, arc);
            let expected = arc.measure() * ph;
            DiscrepancyReport { n, arc: *arc, count, expected, error: count as f64 - expected, bound }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapRow {
    pub n: u64,
    pub gap: f64,
    /// log(1/g) / max(1, log N); infinite when the gap vanishes.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub theta0: Option<f64>,
    pub rows: Vec<GapRow>,
    /// max over the rows of `ratio`, over nonzero gaps.
    pub fitted_c: f64,
    /// N with g(N) below the zero threshold.
    pub zero_at: Vec<u64>,
}

/// Gaps below this are reported as zero.
pub const ZERO_GAP: f64 = 1e-20;

impl GapReport {
    pub fn from_rows(theta0: Option<f64>, rows: Vec<GapRow>) -> Self {
        let zero_at: Vec<u64> = rows.iter().filter(|r| r.gap < ZERO_GAP).map(|r| r.n).collect();
        let fitted_c = rows.iter().filter(|r| r.gap >= ZERO_GAP).map(|r| r.ratio).fold(0.0, f64::max);
        GapReport { theta0, rows, fitted_c, zero_at }
    }

    pub fn all_positive(&self) -> bool {
        self.zero_at.is_empty()
    }

    /// Fitted C over the rows with N <= n_max.
    pub fn fitted_c_upto(&self, n_max: u64) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.n <= n_max && r.gap >= ZERO_GAP)
            .map(|r| r.ratio)
            .fold(0.0, f64::max)
    }
}

pub fn gap_ratio(n: u64, gap: f64) -> f64 {
    if gap < ZERO_GAP {
        return f64::INFINITY;
    }
    (1.0 / gap).ln() / (n as f64).ln().max(1.0)
}

/// g(N) = min_a |theta0 - 2 pi a / N| for N = 1..=n_max, in double-double.
pub fn angle_gap_scan(theta0: Dd, n_max: u64) -> GapReport {
    let rows: Vec<GapRow> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let t = theta0 * Dd::from_f64(n as f64) / Dd::TWO_PI;
            let frac = (t - t.round()).abs();
            let gap = (frac * Dd::TWO_PI / Dd::from_f64(n as f64)).to_f64();
            GapRow { n, gap, ratio: gap_ratio(n, gap) }
        })
        .collect();
    GapReport::from_rows(Some(theta0.to_f64()), rows)
}

/// Argument of alpha in [0, 2 pi), in double-double, with |alpha| = 1 checked
/// on every conjugate.
pub fn unit_circle_argument(alpha: &AlgebraicNumber) -> Result<Dd> {
    let roots = roots_dd(alpha.minpoly())?;
    if roots.iter().any(|r| (r.abs().to_f64() - 1.0).abs() > 1e-12) {
        return Err(LabError::pre("every conjugate of alpha must have absolute value 1"));
    }
    let c = alpha.center();
    let z = roots
        .iter()
        .min_by(|a, b| (**a - c).abs().to_f64().total_cmp(&(**b - c).abs().to_f64()))
        .copied()
        .unwrap();
    let mut t = Dd::atan2(z.im, z.re);
    if t.is_negative() {
        t += Dd::TWO_PI;
    }
    Ok(t)
}

pub fn baker_gap_scan(alpha: &AlgebraicNumber, n_max: u64) -> Result<GapReport> {
    if n_max < 1 {
        return Err(LabError::pre("N_max must be positive"));
    }
    if alpha.is_root_of_unity() {
        return Err(LabError::GapVanishes("alpha is a root of unity".into()));
    }
    let theta0 = unit_circle_argument(alpha)?;
    let report = angle_gap_scan(theta0, n_max);
    if !report.all_positive() {
        return Err(LabError::inv(format!("gap vanished at N = {:?} for a non-torsion alpha", report.zero_at)));
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JensenReport {
    pub integral: f64,
    pub target: f64,
    pub difference: f64,
    pub tolerance: f64,
    /// Bound on the part of the integral not covered by quadrature.
    pub remainder_bound: f64,
    pub converged: bool,
}

pub const JENSEN_TOLERANCE: f64 = 1e-6;
const DYADIC_WIDTH: f64 = 0.5;
const DYADIC_LEVELS: u32 = 40;
const DYADIC_POINTS: usize = 64;

fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, m: usize) -> f64 {
    let m = if m % 2 == 1 { m + 1 } else { m };
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// `(1/2 pi) int log|e^(i theta) - alpha| d theta` against `max(0, log|alpha|)`.
/// Away from the unit circle the periodic trapezoid rule is used; near it the
/// integral is split at the argument of alpha into an outer Simpson part and
/// dyadic panels shrinking to the singularity.
pub fn jensen_check(alpha: &AlgebraicNumber, quad_points: usize) -> Result<JensenReport> {
    if alpha.is_zero() {
        return Err(LabError::pre("alpha must be nonzero"));
    }
    if quad_points < 8 {
        return Err(LabError::pre("at least 8 quadrature points required"));
    }
    let a = alpha.approx();
    let r = a.norm();
    let target = r.ln().max(0.0);
    let tau = std::f64::consts::TAU;
    let f = |t: f64| (num_complex::Complex64::from_polar(1.0, t) - a).norm().ln();
    if (r - 1.0).abs() > 0.1 {
        let h = tau / quad_points as f64;
        let integral = (0..quad_points).map(|k| f(k as f64 * h)).sum::<f64>() / quad_points as f64;
        let difference = integral - target;
        return Ok(JensenReport {
            integral,
            target,
            difference,
            tolerance: JENSEN_TOLERANCE,
            remainder_bound: 0.0,
            converged: difference.abs() < JENSEN_TOLERANCE,
        });
    }
    let t0 = a.arg();
    let g = |phi: f64| f(t0 + phi);
    let w = DYADIC_WIDTH;
    let mut total = simpson(&g, w, tau - w, quad_points);
    let mut hi = w;
    for _ in 0..DYADIC_LEVELS {
        let lo = hi / 2.0;
        total += simpson(&g, lo, hi, DYADIC_POINTS) + simpson(&g, -hi, -lo, DYADIC_POINTS);
        hi = lo;
    }
    let delta = hi;
    // |log|e^(i phi) - alpha|| <= log(pi / (2|phi|)) + log 2 on (-delta, delta)
    let remainder_bound = 2.0 * delta * (1.0 + (std::f64::consts::PI / (2.0 * delta)).ln() + 2f64.ln()) / tau;
    let integral = total / tau;
    let difference = integral - target;
    Ok(JensenReport {
        integral,
        target,
        difference,
        tolerance: JENSEN_TOLERANCE,
        remainder_bound,
        converged: remainder_bound < JENSEN_TOLERANCE && difference.abs() < JENSEN_TOLERANCE,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SplitSumReport {
    pub n: u64,
    pub epsilon: f64,
    /// D = ceil(phi(n)^(1/2)); the central window is |theta - theta0| <= epsilon / D.
    pub d: u64,
    pub total: f64,
    /// Average of the continuous part g = log|z - alpha| - larg.
    pub g_part: f64,
    /// int g d mu = epsilon / pi.
    pub g_target: f64,
    pub central_part: f64,
    pub central_count: u64,
    pub annular_part: f64,
    pub annular_count: u64,
    /// Distance from theta0 to the nearest conjugate angle.
    pub nearest_gap: f64,
    /// Gap constant C with g(N) >= N^(-C) over N <= n.
    pub baker_c: f64,
    /// count * max(0, C max(1, log n) + log epsilon) / phi(n).
    pub central_bound: f64,
    pub g_ok: bool,
    /// |central| within its Baker-controlled bound.
    pub central_ok: bool,
    /// |central| < epsilon, the eventual form of the bound.
    pub central_below_epsilon: bool,
    pub annular_ok: bool,
    pub total_ok: bool,
}

/// Split `(1/phi(n)) sum_sigma log|sigma(zeta_n) - alpha|` for |alpha| = 1
/// into the continuous part, the central window and the annulus, with
/// `larg(z) = min(0, log(|theta - theta0| / epsilon))`.
pub fn split_sum_diagnostics(alpha: &AlgebraicNumber, n: u64, epsilon: f64) -> Result<SplitSumReport> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(LabError::pre("epsilon must lie in (0, 1)"));
    }
    if n == 0 {
        return Err(LabError::pre("n must be positive"));
    }
    if alpha.is_root_of_unity() {
        return Err(LabError::GapVanishes("alpha is a root of unity".into()));
    }
    let theta0 = unit_circle_argument(alpha)?;
    let c = angle_gap_scan(theta0, n).fitted_c;
    Ok(split_sum_at(theta0, n, epsilon, c))
}

pub fn split_sum_at(theta0: Dd, n: u64, epsilon: f64, baker_c: f64) -> SplitSumReport {
    let ph = phi(n);
    let d = (ph as f64).sqrt().ceil() as u64;
    let window = epsilon / d as f64;
    let (mut g_sum, mut c_sum, mut a_sum) = (0.0, 0.0, 0.0);
    let (mut c_cnt, mut a_cnt) = (0u64, 0u64);
    let mut nearest = f64::INFINITY;
    for a in 0..n {
        if a.gcd(&n) != 1 {
            continue;
        }
        // phi in (-pi, pi]
        let th = Dd::TWO_PI * Dd::from_f64(a as f64) / Dd::from_f64(n as f64);
        let mut dphi = th - theta0;
        dphi = dphi - Dd::TWO_PI * (dphi / Dd::TWO_PI).round();
        let x = dphi.to_f64().abs();
        nearest = nearest.min(x);
        let term = (2.0 * (x / 2.0).sin()).ln();
        let larg = (x / epsilon).ln().min(0.0);
        g_sum += term - larg;
        if x <= window {
            c_sum += larg;
            c_cnt += 1;
        } else if x < epsilon {
            a_sum += larg;
            a_cnt += 1;
        }
    }
    let phf = ph as f64;
    let (g_part, central_part, annular_part) = (g_sum / phf, c_sum / phf, a_sum / phf);
    let total = g_part + central_part + annular_part;
    let central_bound = c_cnt as f64 * (baker_c * (n as f64).ln().max(1.0) + epsilon.ln()).max(0.0) / phf;
    SplitSumReport {
        n,
        epsilon,
        d,
        total,
        g_part,
        g_target: epsilon / std::f64::consts::PI,
        central_part,
        central_count: c_cnt,
        annular_part,
        annular_count: a_cnt,
        nearest_gap: nearest,
        baker_c,
        central_bound,
        g_ok: g_part.abs() < epsilon,
        central_ok: central_part.abs() <= central_bound * (1.0 + 1e-12),
        central_below_epsilon: central_part.abs() < epsilon,
        annular_ok: annular_part > -4.0 * epsilon && annular_part <= 0.0,
        total_ok: total.abs() < 6.0 * epsilon,
    }
}

/// Unit-modulus Gaussian rational (3 + 4i)/5, the standard non-torsion sample.
pub fn sample_unit_alpha() -> AlgebraicNumber {
    AlgebraicNumber::from_minpoly(
        &crate::arith::poly::IntPolynomial::from_i64(&[5, -6, 5]),
        num_complex::Complex64::new(0.6, 0.8),
    )
    .expect("5x^2 - 6x + 5 is irreducible")
}

pub fn cdd_arg(z: Cdd) -> Dd {
    Dd::atan2(z.im, z.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(n: u64, q: u64, b: i64, c: f64, d: f64) -> i64 {
        let (lo, hi) = (c.floor() as i64, d.floor() as i64);
        (lo + 1..=hi)
            .filter(|a| (a.rem_euclid(n as i64) as u64).gcd(&n) == 1 && (a - b).rem_euclid(q as i64) == 0)
            .count() as i64
    }

    #[test]
    fn count_examples() {
        let r = coprime_progression_count(&CountQuery { n: 12, q: 2, b: 1, c: 0.0, d: 12.0 }).unwrap();
        assert_eq!((r.count, r.main_term, r.bound), (4, 4.0, 6));
        let r = coprime_progression_count(&CountQuery { n: 12, q: 12, b: 1, c: 0.0, d: 12.0 }).unwrap();
        assert_eq!((r.count, r.main_term), (1, 1.0));
        let r = coprime_progression_count(&CountQuery { n: 30, q: 1, b: 1, c: 0.0, d: 15.0 }).unwrap();
        assert_eq!(r.count, 4);
        assert!((r.main_term - 4.0).abs() < 1e-12);
        assert!(coprime_progression_count(&CountQuery { n: 12, q: 5, b: 1, c: 0.0, d: 1.0 }).is_err());
        assert!(coprime_progression_count(&CountQuery { n: 12, q: 4, b: 2, c: 0.0, d: 1.0 }).is_err());
    }

    #[test]
    fn count_matches_brute_force() {
        for n in 1..60u64 {
            for q in (1..=n).filter(|q| n % q == 0) {
                for b in (-3..(q as i64)).filter(|b| (b.rem_euclid(q as i64) as u64).gcd(&q) == 1) {
                    for (c, d) in [(-7.5, 3.2), (0.0, 100.0), (13.9, 14.1), (-50.0, -1.0)] {
                        let r = coprime_progression_count(&CountQuery { n, q, b, c, d }).unwrap();
                        assert_eq!(r.count, brute(n, q, b, c, d), "n={n} q={q} b={b} ({c},{d}]");
                    }
                }
            }
        }
    }

    #[test]
    fn arc_examples() {
        let pi = std::f64::consts::PI;
        let r = arc_discrepancy(5, &[ArcInterval::new(0.0, pi).unwrap()]).unwrap();
        assert_eq!(r[0].count, 2);
        assert_eq!(r[0].error, 0.0);
        let r = arc_discrepancy(1, &[ArcInterval::new(-pi, pi).unwrap()]).unwrap();
        assert_eq!((r[0].count, r[0].expected), (1, 1.0));
    }

    #[test]
    fn gap_examples() {
        let alpha = sample_unit_alpha();
        let g = baker_gap_scan(&alpha, 4).unwrap();
        let theta0 = (0.8f64).atan2(0.6);
        assert!((g.rows[0].gap - theta0).abs() < 1e-15);
        assert!((g.rows[3].gap - (theta0 - std::f64::consts::FRAC_PI_2).abs()).abs() < 1e-15);
        let z = AlgebraicNumber::from_minpoly(&crate::arith::cyclotomic::cyclotomic(7), num_complex::Complex64::new(0.62, 0.78)).unwrap();
        assert!(matches!(baker_gap_scan(&z, 10), Err(LabError::GapVanishes(_))));
        let control = angle_gap_scan(Dd::TWO_PI * 3.0 / 7.0, 20);
        assert_eq!(control.zero_at, vec![7, 14]);
    }

    #[test]
    fn jensen_examples() {
        let r = jensen_check(&AlgebraicNumber::from_integer(2), 256).unwrap();
        assert!((r.integral - 2f64.ln()).abs() < 1e-12);
        let r = jensen_check(&AlgebraicNumber::from_fraction(1, 2), 256).unwrap();
        assert!(r.integral.abs() < 1e-12);
        let r = jensen_check(&sample_unit_alpha(), 1 << 16).unwrap();
        assert!(r.converged, "{r:?}");
        assert!(r.integral.abs() < 1e-6);
    }

    #[test]
    fn split_examples() {
        let alpha = sample_unit_alpha();
        let r = split_sum_diagnostics(&alpha, 210, 0.1).unwrap();
        assert_eq!(r.d, 7);
        assert!(r.g_ok && r.central_ok && r.annular_ok && r.total_ok, "{r:?}");
        let one = split_sum_diagnostics(&alpha, 1, 0.1).unwrap();
        let direct = (num_complex::Complex64::new(1.0, 0.0) - alpha.approx()).norm().ln();
        assert!((one.total - direct).abs() < 1e-14);
    }
}
