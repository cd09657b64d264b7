//! Complex roots of integer polynomials: Aberth–Ehrlich iteration in f64,
//! Newton polishing in double-double, and inclusion-disc certification.

use super::poly::IntPolynomial;
use super::zfactor::squarefree_decomposition;
use crate::dd::{Cdd, Dd};
use crate::error::{LabError, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

pub const MAX_ITERATIONS: usize = 2000;

/// A root approximation with a radius guaranteed to contain a true root.
#[derive(Clone, Copy, Debug)]
pub struct CertifiedRoot {
    pub z: Cdd,
    pub radius: f64,
}

impl CertifiedRoot {
    pub fn c64(&self) -> Complex64 {
        self.z.to_c64()
    }
}

/// `c / 2^s` in double-double without overflow for huge `c`.
fn dd_scaled(c: &BigInt, s: u64) -> Dd {
    let b = c.bits();
    if b <= 120 {
        return Dd::from_bigint(c).ldexp(-(s as i32));
    }
    let t: BigInt = c >> (b - 120);
    Dd::from_bigint(&t).ldexp((b - 120) as i32 - s as i32)
}

/// Scaled coefficients: lowest degree first, largest magnitude about 1.
struct Scaled {
    dd: Vec<Dd>,
    f: Vec<f64>,
}

impl Scaled {
    fn new(p: &IntPolynomial) -> Scaled {
        let s = p.max_coeff_bits();
        let dd: Vec<Dd> = p.coeffs().iter().map(|c| dd_scaled(c, s)).collect();
        let f = dd.iter().map(|d| d.to_f64()).collect();
        Scaled { dd, f }
    }

    fn n(&self) -> usize {
        self.f.len() - 1
    }
}

/// Ratio p(z)/p'(z) in f64, using the reversed polynomial outside the unit disc.
fn newton_ratio(c: &[f64], z: Complex64) -> Complex64 {
    let n = c.len() - 1;
    if z.norm() <= 1.0 {
        let mut p = Complex64::new(c[n], 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for k in (0..n).rev() {
            dp = dp * z + p;
            p = p * z + c[k];
        }
        p / dp
    } else {
        // p(z) = z^n q(w), w = 1/z, q_k = c_{n-k}
        let w = 1.0 / z;
        let mut q = Complex64::new(c[0], 0.0);
        let mut dq = Complex64::new(0.0, 0.0);
        for k in 1..=n {
            dq = dq * w + q;
            q = q * w + c[k];
        }
        // p'/p = n/z - w^2 q'(w)/q(w)
        let ratio = (n as f64) * w - w * w * dq / q;
        1.0 / ratio
    }
}

/// Initial points on circles whose radii come from the upper Newton polygon
/// of (k, log|c_k|).
fn initial_points(c: &[f64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let pts: Vec<(usize, f64)> = c
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(k, v)| (k, v.abs().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 as f64 - a.0 as f64) * (p.1 - a.1) - (b.1 - a.1) * (p.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out = Vec::with_capacity(n);
    let sigma = 0.7;
    for w in hull.windows(2) {
        let (k0, l0) = w[0];
        let (k1, l1) = w[1];
        let m = k1 - k0;
        let u = ((l0 - l1) / m as f64).exp();
        for i in 0..m {
            let ang = std::f64::consts::TAU * (i as f64 / m as f64 + k0 as f64 / n as f64) + sigma;
            out.push(Complex64::from_polar(u, ang));
        }
    }
    out
}

fn aberth(c: &[f64]) -> std::result::Result<Vec<Complex64>, Vec<Complex64>> {
    let n = c.len() - 1;
    let mut z = initial_points(c);
    let mut done = vec![false; n];
    for _ in 0..MAX_ITERATIONS {
        let mut all = true;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let r = newton_ratio(c, z[k]);
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    s += 1.0 / (z[k] - z[j]);
                }
            }
            // r -> infinity: the correction tends to -1/s
            let step = if r.re.is_finite() && r.im.is_finite() && r.norm() < 1e150 {
                r / (1.0 - r * s)
            } else {
                -1.0 / s
            };
            z[k] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z[k].norm().max(f64::MIN_POSITIVE) {
                done[k] = true;
            } else {
                all = false;
            }
        }
        if all {
            return Ok(z);
        }
    }
    if z.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        // late stragglers are judged by the certification step
        Ok(z)
    } else {
        Err(z)
    }
}

/// Horner in double-double for p(z), p'(z) and the running-error sum of
/// |c_k||z|^k; switches to the reversed polynomial outside the unit disc.
/// Returns (p/p', log|p(z)| + log-bound of rounding).
fn eval_dd(c: &[Dd], z: Cdd) -> (Cdd, f64, f64) {
    let n = c.len() - 1;
    let zn = z.abs().to_f64();
    if zn <= 1.0 {
        let mut p = Cdd::real(c[n]);
        let mut dp = Cdd::ZERO;
        let mut mag = c[n].to_f64().abs();
        for k in (0..n).rev() {
            dp = dp * z + p;
            p = p * z + Cdd::real(c[k]);
            mag = mag * zn + c[k].to_f64().abs();
        }
        (p / dp, p.abs().to_f64().ln(), mag.ln())
    } else {
        let w = z.recip();
        let wn = 1.0 / zn;
        let mut q = Cdd::real(c[0]);
        let mut dq = Cdd::ZERO;
        let mut mag = c[0].to_f64().abs();
        for k in 1..=n {
            dq = dq * w + q;
            q = q * w + Cdd::real(c[k]);
            mag = mag * wn + c[k].to_f64().abs();
        }
        let ratio = w.scale(Dd::from_f64(n as f64)) - w * w * dq / q;
        let nl = n as f64 * zn.ln();
        (ratio.recip(), q.abs().to_f64().ln() + nl, mag.ln() + nl)
    }
}

fn polish(c: &[Dd], z: Cdd) -> Cdd {
    let mut z = z;
    for _ in 0..4 {
        let (r, _, _) = eval_dd(c, z);
        if !r.re.to_f64().is_finite() || !r.im.to_f64().is_finite() {
            break;
        }
        z = z - r;
        if r.abs().to_f64() <= 1e-33 * z.abs().to_f64().max(1e-300) {
            break;
        }
    }
    z
}

/// Inclusion radii n|p(z_k)| / |a_n prod_{j != k}(z_k - z_j)|, widened to the
/// radius of the overlapping component.
fn certify(c: &[Dd], z: &[Cdd]) -> Vec<f64> {
    let n = z.len();
    let ln_an = c[n].to_f64().abs().ln();
    let u = 2f64.powi(-100) * (4 * n + 8) as f64;
    let mut rad = vec![0.0f64; n];
    let zc: Vec<Complex64> = z.iter().map(|v| v.to_c64()).collect();
    for k in 0..n {
        let (_, lp, lmag) = eval_dd(c, z[k]);
        // |p| plus rounding error, in log space
        let le = lmag + u.ln();
        let lres = if lp.is_finite() { lp.max(le) + (1.0 + (-(lp - le).abs()).exp()).ln() } else { le };
        let mut lprod = ln_an;
        for j in 0..n {
            if j != k {
                let d = (z[k] - z[j]).abs().to_f64();
                lprod += if d > 0.0 { d.ln() } else { f64::NEG_INFINITY };
            }
        }
        rad[k] = ((n as f64).ln() + lres - lprod).exp();
        if !rad[k].is_finite() {
            rad[k] = f64::INFINITY;
        }
    }
    // union of overlapping discs
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(c: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while c[i] != i {
            c[i] = c[c[i]];
            i = c[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (zc[i] - zc[j]).norm() <= rad[i] + rad[j] {
                let (a, b) = (find(&mut comp, i), find(&mut comp, j));
                if a != b {
                    comp[a] = b;
                }
            }
        }
    }
    let root: Vec<usize> = (0..n).map(|i| find(&mut comp, i)).collect();
    let mut diam = vec![0.0f64; n];
    let mut members = vec![0usize; n];
    for i in 0..n {
        diam[root[i]] += 2.0 * rad[i];
        members[root[i]] += 1;
    }
    (0..n).map(|i| if members[root[i]] == 1 { rad[i] } else { diam[root[i]] }).collect()
}

fn roots_squarefree(g: &IntPolynomial) -> Result<Vec<CertifiedRoot>> {
    let n = g.deg();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        let z = Dd::from_bigint(&-g.coeff(0)) / Dd::from_bigint(&g.coeff(1));
        return Ok(vec![CertifiedRoot { z: Cdd::real(z), radius: z.to_f64().abs() * 1e-31 }]);
    }
    let sc = Scaled::new(g);
    debug_assert_eq!(sc.n(), n);
    let approx = aberth(&sc.f).map_err(|partial| LabError::NoConvergence { iterations: MAX_ITERATIONS, partial })?;
    let z: Vec<Cdd> = approx.iter().map(|&a| polish(&sc.dd, Cdd::from_c64(a))).collect();
    let radii = certify(&sc.dd, &z);
    Ok(z.into_iter().zip(radii).map(|(z, radius)| CertifiedRoot { z, radius }).collect())
}

/// All complex roots with multiplicity, each with a certified radius.
pub fn certified_roots(f: &IntPolynomial) -> Result<Vec<CertifiedRoot>> {
    if f.is_zero() {
        return Err(LabError::pre("complex_roots of the zero polynomial"));
    }
    let zeros = f.coeffs().iter().take_while(|c| c.is_zero()).count();
    let core = IntPolynomial::new(f.coeffs()[zeros..].to_vec());
    let mut out: Vec<CertifiedRoot> = vec![CertifiedRoot { z: Cdd::ZERO, radius: 0.0 }; zeros];
    let mut partial_fail: Option<Vec<Complex64>> = None;
    for (g, e) in squarefree_decomposition(&core) {
        match roots_squarefree(&g) {
            Ok(rs) => {
                for _ in 0..e {
                    out.extend(rs.iter().cloned());
                }
            }
            Err(LabError::NoConvergence { partial, .. }) => {
                partial_fail.get_or_insert_with(Vec::new).extend(partial);
            }
            Err(e) => return Err(e),
        }
    }
    if let Some(mut partial) = partial_fail {
        partial.extend(out.iter().map(|r| r.c64()));
        return Err(LabError::NoConvergence { iterations: MAX_ITERATIONS, partial });
    }
    out.sort_by(|a, b| {
        let (x, y) = (a.c64(), b.c64());
        x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im))
    });
    Ok(out)
}

/// One approximation per root (with multiplicity), each certified within
/// `tol` of a true root, ordered by (real, imaginary).
pub fn complex_roots(f: &IntPolynomial, tol: f64) -> Result<Vec<Complex64>> {
    if tol <= 0.0 || tol.is_nan() {
        return Err(LabError::pre("tolerance must be positive"));
    }
    let rs = certified_roots(f)?;
    if rs.iter().any(|r| !(r.radius <= tol)) {
        return Err(LabError::NoConvergence {
            iterations: MAX_ITERATIONS,
            partial: rs.iter().map(|r| r.c64()).collect(),
        });
    }
    Ok(rs.iter().map(|r| r.c64()).collect())
}

/// log M(f) = log|lead| + sum over roots of max(0, log|root|).
pub fn log_mahler_measure(f: &IntPolynomial) -> Result<f64> {
    let rs = certified_roots(f)?;
    let lead = f.lead().abs();
    let mut s = crate::dd::ln_bigint(&lead);
    for r in rs {
        let a = r.z.abs().to_f64();
        if a > 1.0 {
            s += a.ln();
        }
    }
    Ok(s)
}

/// Certified roots in double-double, for callers that need more than f64.
pub fn roots_dd(f: &IntPolynomial) -> Result<Vec<Cdd>> {
    Ok(certified_roots(f)?.into_iter().map(|r| r.z).collect())
}

pub fn lead_f64(f: &IntPolynomial) -> f64 {
    f.lead().to_f64().unwrap_or(f64::INFINITY)
}

use num_traits::Signed;
