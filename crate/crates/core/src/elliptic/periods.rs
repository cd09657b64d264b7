//! Period lattice, Weierstrass ℘ and the elliptic logarithm.
//!
//! With X = x + b2/12 and Y = 2y + a1x + a3 the curve becomes
//! Y² = 4X³ − g2X − g3, g2 = c4/12, g3 = c6/216, uniformized by (℘, ℘').
//! All q-series are evaluated on a Gauss-reduced basis so |q| ≤ e^{−π√3}.

use super::curve::WeierstrassCurve;
use super::point::CurvePoint;
use crate::arith::poly::IntPolynomial;
use crate::arith::roots::certified_roots;
use crate::dd::{Cdd, Dd};
use crate::error::{LabError, Result};
use num_bigint::Sign;
use num_complex::Complex64;
use serde::Serialize;

const AGM_MAX_STEPS: usize = 80;
const SERIES_TOL: f64 = 1e-34;
const SERIES_MAX_TERMS: usize = 20_000;

#[derive(Clone, Debug)]
pub struct PeriodLattice {
    /// ω1 is the least positive real period.
    pub omega1: Cdd,
    pub omega2: Cdd,
    pub eta1: Cdd,
    pub eta2: Cdd,
    pub g2: Dd,
    pub g3: Dd,
    /// b2/12, the shift from x to X.
    pub shift: Dd,
    /// Reduced basis w1, w2 with w = M·ω for the integer matrix `to_reduced`.
    pub w1: Cdd,
    pub w2: Cdd,
    pub tau: Cdd,
    pub q: Cdd,
    pub eta_w1: Cdd,
    pub eta_w2: Cdd,
    to_reduced: [[i64; 2]; 2],
}

/// Float summary for reports.
#[derive(Clone, Debug, Serialize)]
pub struct PeriodSummary {
    pub omega1: [f64; 2],
    pub omega2: [f64; 2],
    pub eta1: [f64; 2],
    pub eta2: [f64; 2],
    pub tau_reduced: [f64; 2],
    pub area: f64,
    pub legendre_residual: f64,
}

fn c2(z: Cdd) -> [f64; 2] {
    let c = z.to_c64();
    [c.re, c.im]
}

fn agm_real(mut a: Dd, mut b: Dd) -> Result<Dd> {
    for _ in 0..AGM_MAX_STEPS {
        let close = (a - b).abs().to_f64() <= 1e-12 * a.to_f64().abs();
        let an = (a + b) * 0.5;
        b = (a * b).sqrt();
        a = an;
        if close {
            // quadratic convergence: one more step lands below DD resolution
            let an = (a + b) * 0.5;
            b = (a * b).sqrt();
            return Ok((an + b) * 0.5);
        }
    }
    Err(LabError::inv("arithmetic-geometric mean did not converge"))
}

fn two_pi_i() -> Cdd {
    Cdd::new(Dd::ZERO, Dd::TWO_PI)
}

/// Σ n qⁿ/(1 − qⁿ), summed until the terms drop below the tolerance.
fn lambert_sigma1(q: Cdd) -> Result<Cdd> {
    let mut s = Cdd::ZERO;
    let mut qn = Cdd::ONE;
    for n in 1..=SERIES_MAX_TERMS {
        qn = qn * q;
        let t = qn / (Cdd::ONE - qn) * Dd::from_f64(n as f64);
        s += t;
        if t.abs().to_f64() < SERIES_TOL * s.abs().to_f64().max(1e-300) || qn.abs().to_f64() == 0.0 {
            return Ok(s);
        }
    }
    Err(LabError::inv("q-series did not converge"))
}

/// η(w1) for the basis (w1, w2) from the Eisenstein series E2(w2/w1).
fn quasi_period(w1: Cdd, w2: Cdd) -> Result<Cdd> {
    let tau = w2 / w1;
    let q = (two_pi_i() * tau).exp();
    let e2 = Cdd::ONE - lambert_sigma1(q)? * Dd::from_f64(24.0);
    let pi2_3 = Dd::PI * Dd::PI / Dd::from_f64(3.0);
    Ok(e2.scale(pi2_3) / w1)
}

impl PeriodLattice {
    pub fn new(e: &WeierstrassCurve) -> Result<Self> {
        let g2 = Dd::from_bigint(&e.c4) / Dd::from_f64(12.0);
        let g3 = Dd::from_bigint(&e.c6) / Dd::from_f64(216.0);
        let shift = Dd::from_bigint(&e.b2) / Dd::from_f64(12.0);
        let cubic = IntPolynomial::new(e.two_torsion_cubic().to_vec());
        let xs = certified_roots(&cubic)?;
        let mut es: Vec<Cdd> = xs.iter().map(|r| r.z + Cdd::real(shift)).collect();
        let (omega1, omega2) = if e.disc.sign() == Sign::Plus {
            let mut re: Vec<Dd> = es.iter().map(|z| z.re).collect();
            re.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let (e1, e2, e3) = (re[0], re[1], re[2]);
            let w1 = Dd::PI / agm_real((e1 - e3).sqrt(), (e1 - e2).sqrt())?;
            let w2 = Dd::PI / agm_real((e1 - e3).sqrt(), (e2 - e3).sqrt())?;
            (Cdd::real(w1), Cdd::new(Dd::ZERO, w2))
        } else {
            es.sort_by(|a, b| a.im.abs().partial_cmp(&b.im.abs()).unwrap());
            let e1 = es[0].re;
            let three_e1 = e1 * 3.0;
            let beta = (e1 * e1 * 3.0 - g2 * 0.25).sqrt();
            let w1 = Dd::TWO_PI / agm_real((beta * 4.0).sqrt(), (beta * 2.0 + three_e1).sqrt())?;
            let w2im = Dd::PI / agm_real((beta * 4.0).sqrt(), (beta * 2.0 - three_e1).sqrt())?;
            (Cdd::real(w1), Cdd::new(-(w1 * 0.5), w2im))
        };
        let (w1, w2, m) = gauss_reduce(omega1, omega2);
        let tau = w2 / w1;
        let q = (two_pi_i() * tau).exp();
        let eta_w1 = quasi_period(w1, w2)?;
        let eta_w2 = quasi_period(w2, -w1)?;
        // ω = M⁻¹w with det M = 1.
        let inv = [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]];
        let comb = |r: [i64; 2], a: Cdd, b: Cdd| a * Dd::from_i64(r[0]) + b * Dd::from_i64(r[1]);
        let eta1 = comb(inv[0], eta_w1, eta_w2);
        let eta2 = comb(inv[1], eta_w1, eta_w2);
        Ok(PeriodLattice { omega1, omega2, eta1, eta2, g2, g3, shift, w1, w2, tau, q, eta_w1, eta_w2, to_reduced: m })
    }

    /// Real and imaginary coordinates (s, t) with z = s·w1 + t·w2.
    pub fn reduced_coords(&self, z: Cdd) -> (Dd, Dd) {
        let zz = z / self.w1;
        let t = zz.im / self.tau.im;
        let s = zz.re - t * self.tau.re;
        (s, t)
    }

    /// Coordinates with respect to (ω1, ω2).
    pub fn coords(&self, z: Cdd) -> (Dd, Dd) {
        let (s, t) = self.reduced_coords(z);
        let m = self.to_reduced;
        (s * Dd::from_i64(m[0][0]) + t * Dd::from_i64(m[1][0]), s * Dd::from_i64(m[0][1]) + t * Dd::from_i64(m[1][1]))
    }

    pub fn from_coords(&self, s: Dd, t: Dd) -> Cdd {
        self.omega1 * s + self.omega2 * t
    }

    /// Representative of z + Λ with reduced coordinates in [−½, ½)².
    pub fn reduce(&self, z: Cdd) -> Cdd {
        let (s, t) = self.reduced_coords(z);
        let s = s - (s + 0.5).floor();
        let t = t - (t + 0.5).floor();
        self.w1 * s + self.w2 * t
    }

    /// Representative with reduced coordinates s ∈ [−½, ½), t ∈ [0, 1).
    pub fn reduce_upper(&self, z: Cdd) -> (Cdd, Dd) {
        let (s, t) = self.reduced_coords(z);
        let s = s - (s + 0.5).floor();
        let t = t - t.floor();
        (self.w1 * s + self.w2 * t, t)
    }

    pub fn area(&self) -> Dd {
        (self.omega1.conj() * self.omega2).im.abs()
    }

    /// η(ω1)ω2 − η(ω2)ω1 − 2πi.
    pub fn legendre_residual(&self) -> f64 {
        (self.eta1 * self.omega2 - self.eta2 * self.omega1 - two_pi_i()).abs().to_f64()
    }

    /// Quasi-period map extended R-linearly: η(sω1 + tω2) = sη1 + tη2.
    pub fn eta_linear(&self, z: Cdd) -> Cdd {
        let (s, t) = self.coords(z);
        self.eta1 * s + self.eta2 * t
    }

    /// (℘(z), ℘'(z)).
    pub fn wp(&self, z: Cdd) -> (Cdd, Cdd) {
        let zr = self.reduce(z);
        let k = two_pi_i() / self.w1;
        let u = (k * zr).exp();
        let one = Cdd::ONE;
        let mut p = Cdd::real(Dd::ONE / 12.0) + u / ((one - u) * (one - u));
        let mut dp = u * (one + u) / (one - u).powi(3);
        let ui = u.recip();
        let mut qn = Cdd::ONE;
        for _ in 1..=SERIES_MAX_TERMS {
            qn = qn * self.q;
            let a = qn * u;
            let v = qn * ui;
            let ta = a / ((one - a) * (one - a));
            let tv = v / ((one - v) * (one - v));
            let tq = (qn / ((one - qn) * (one - qn))) * Dd::from_f64(2.0);
            p += ta + tv - tq;
            let da = a * (one + a) / (one - a).powi(3) - v * (one + v) / (one - v).powi(3);
            dp += da;
            if (ta.abs() + tv.abs()).to_f64() < SERIES_TOL * p.abs().to_f64().max(1e-300) && da.abs().to_f64() < SERIES_TOL * dp.abs().to_f64().max(1e-300) {
                break;
            }
        }
        (p * k * k, dp * k * k * k)
    }

    /// (x, y) on the original model from a complex parameter.
    pub fn point_at(&self, e: &WeierstrassCurve, z: Cdd) -> (Cdd, Cdd) {
        let (p, dp) = self.wp(z);
        let x = p - Cdd::real(self.shift);
        let a1 = Dd::from_bigint(&e.a1);
        let a3 = Dd::from_bigint(&e.a3);
        let y = (dp - x * a1 - Cdd::real(a3)) * 0.5;
        (x, y)
    }

    pub fn summary(&self) -> PeriodSummary {
        PeriodSummary {
            omega1: c2(self.omega1),
            omega2: c2(self.omega2),
            eta1: c2(self.eta1),
            eta2: c2(self.eta2),
            tau_reduced: c2(self.tau),
            area: self.area().to_f64(),
            legendre_residual: self.legendre_residual(),
        }
    }

    /// Lattice fraction (l1ω1 + l2ω2)/n.
    pub fn fraction(&self, l1: i64, l2: i64, n: u64) -> Cdd {
        let nn = Dd::from_f64(n as f64);
        self.omega1 * (Dd::from_i64(l1) / nn) + self.omega2 * (Dd::from_i64(l2) / nn)
    }

    /// Distance from z to the nearest lattice point.
    pub fn distance_to_lattice(&self, z: Cdd) -> Dd {
        let zr = self.reduce(z);
        let mut best = zr.abs();
        for i in -1..=1 {
            for j in -1..=1 {
                let w = zr - self.w1 * Dd::from_i64(i) - self.w2 * Dd::from_i64(j);
                best = best.min(w.abs());
            }
        }
        best
    }
}

/// Reduce τ = w2/w1 into |Re τ| ≤ ½, |τ| ≥ 1; returns (w1, w2, M) with
/// (w1, w2)ᵀ = M·(ω1, ω2)ᵀ.
fn gauss_reduce(omega1: Cdd, omega2: Cdd) -> (Cdd, Cdd, [[i64; 2]; 2]) {
    let (mut w1, mut w2) = (omega1, omega2);
    let mut m = [[1i64, 0], [0, 1]];
    for _ in 0..200 {
        let tau = w2 / w1;
        let k = tau.re.round();
        let ki = k.to_f64() as i64;
        if ki != 0 {
            w2 = w2 - w1 * k;
            m[1] = [m[1][0] - ki * m[0][0], m[1][1] - ki * m[0][1]];
        }
        let tau = w2 / w1;
        if tau.norm_sqr().to_f64() < 1.0 - 1e-15 {
            let (n1, n2) = (w2, -w1);
            w1 = n1;
            w2 = n2;
            m = [m[1], [-m[0][0], -m[0][1]]];
        } else {
            break;
        }
    }
    (w1, w2, m)
}

/// Carlson's symmetric integral R_F in complex double precision.
fn carlson_rf(mut x: Complex64, mut y: Complex64, mut z: Complex64) -> Complex64 {
    for _ in 0..200 {
        let a = (x + y + z) / 3.0;
        let dx = 1.0 - x / a;
        let dy = 1.0 - y / a;
        let dz = 1.0 - z / a;
        if dx.norm().max(dy.norm()).max(dz.norm()) < 1e-4 {
            let e2 = dx * dy - dz * dz;
            let e3 = dx * dy * dz;
            return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / a.sqrt();
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let l = sx * sy + sy * sz + sz * sx;
        x = (x + l) / 4.0;
        y = (y + l) / 4.0;
        z = (z + l) / 4.0;
    }
    Complex64::new(f64::NAN, f64::NAN)
}

fn newton_log(lat: &PeriodLattice, mut z: Cdd, target: Cdd) -> Cdd {
    for _ in 0..40 {
        let (p, dp) = lat.wp(z);
        if dp.abs().to_f64() == 0.0 {
            break;
        }
        let step = (p - target) / dp;
        let sz = step.abs().to_f64();
        z = z - step;
        if !sz.is_finite() || sz < 1e-31 * z.abs().to_f64().max(1.0) {
            break;
        }
    }
    z
}

/// Elliptic logarithm: z with (℘(z), ℘'(z)) = (X, Y), reduced mod Λ.
pub fn elliptic_log(e: &WeierstrassCurve, lat: &PeriodLattice, p: &CurvePoint) -> Result<Cdd> {
    e.check(p)?;
    let (x, y) = match p {
        CurvePoint::Infinity => return Ok(Cdd::ZERO),
        CurvePoint::Affine(x, y) => (Dd::from_rational(x), Dd::from_rational(y)),
    };
    let a1 = Dd::from_bigint(&e.a1);
    let a3 = Dd::from_bigint(&e.a3);
    let xx = Cdd::real(x + lat.shift);
    let yy = Cdd::real(y * 2.0 + a1 * x + a3);
    let scale = xx.abs().to_f64().max(1.0);
    let accept = |z: Cdd| {
        let (pz, dpz) = lat.wp(z);
        let ex = (pz - xx).abs().to_f64() / scale;
        let ey = (dpz - yy).abs().to_f64() / scale.powf(1.5);
        (ex, ey)
    };
    let fix_sign = |z: Cdd| {
        let (_, dpz) = lat.wp(z);
        if (dpz + yy).abs() < (dpz - yy).abs() {
            -z
        } else {
            z
        }
    };
    let mut seeds: Vec<Cdd> = Vec::new();
    if yy.abs().to_f64() < 1e-25 * scale.powf(1.5) {
        for (s, t) in [(0.5, 0.0), (0.0, 0.5), (0.5, 0.5)] {
            seeds.push(lat.w1 * s + lat.w2 * t);
        }
    } else {
        let roots: Vec<Complex64> = {
            let cubic = IntPolynomial::new(e.two_torsion_cubic().to_vec());
            certified_roots(&cubic)?.iter().map(|r| r.c64() + Complex64::new(lat.shift.to_f64(), 0.0)).collect()
        };
        let xc = Complex64::new(xx.re.to_f64(), 1e-300);
        let z0 = carlson_rf(xc - roots[0], xc - roots[1], xc - roots[2]);
        if z0.re.is_finite() && z0.im.is_finite() {
            seeds.push(Cdd::from_c64(z0));
        }
        let n = 24;
        let mut grid: Vec<(f64, Cdd)> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let s = (i as f64 + 0.5) / n as f64 - 0.5;
                let t = (j as f64 + 0.5) / n as f64 - 0.5;
                let z = lat.w1 * s + lat.w2 * t;
                let (pz, _) = lat.wp(z);
                grid.push(((pz - xx).abs().to_f64(), z));
            }
        }
        grid.sort_by(|a, b| a.0.total_cmp(&b.0));
        seeds.extend(grid.iter().take(6).map(|g| g.1));
    }
    let mut best: Option<(f64, Cdd)> = None;
    // ℘' vanishes at the half periods, so a seed there is scored before Newton
    'seeds: for s in seeds {
        for z in [s, fix_sign(newton_log(lat, s, xx))] {
            let (ex, ey) = accept(z);
            let err = ex.max(ey);
            if err.is_finite() && best.map_or(true, |b| err < b.0) {
                best = Some((err, z));
            }
            if err < 1e-26 {
                break 'seeds;
            }
        }
    }
    match best {
        Some((err, z)) if err < 1e-20 => Ok(lat.reduce(z)),
        Some((err, _)) => Err(LabError::inv(format!("elliptic logarithm round-trip residual {err:.3e}"))),
        None => Err(LabError::inv("elliptic logarithm failed")),
    }
}

pub fn periods_and_log(e: &WeierstrassCurve, p: &CurvePoint) -> Result<(PeriodLattice, Cdd)> {
    let lat = PeriodLattice::new(e)?;
    let z = elliptic_log(e, &lat, p)?;
    Ok((lat, z))
}
