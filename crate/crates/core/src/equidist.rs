//! Galois orbits of torsion on E(C): lattice-fraction counts in convex
//! regions, degrees of torsion point fields, the Tate component loop and
//! elliptic-logarithm gaps.

use crate::arith::factor::primes_up_to;
use crate::arith::functions::{distinct_primes, divisors, moebius};
use crate::arith::modp::{is_square_mod, roots, PolyMod};
use crate::arith::zfactor::factor_z;
use crate::circle::{gap_ratio, GapReport, GapRow};
use crate::dd::{Cdd, Dd};
use crate::elliptic::division::DivisionTower;
use crate::elliptic::{elliptic_log, CurvePoint, PeriodLattice, WeierstrassCurve};
use crate::error::{LabError, Result};
use crate::heights::local::{bernoulli2, TateLocalData};
use crate::heights::scan::primitive_orbit;
use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RegionShape {
    /// Unit disc.
    Disc,
    /// The period parallelogram {sω1 + tω2 : s, t ∈ [−½, ½)}.
    Parallelogram,
}

/// 𝒮(a, r) = a + r·𝒮 with the center given in period coordinates,
/// a = c1·ω1 + c2·ω2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvexRegion {
    pub shape: RegionShape,
    pub center: [f64; 2],
    pub r: f64,
}

impl fmt::Display for ConvexRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.shape {
            RegionShape::Disc => "disc",
            RegionShape::Parallelogram => "parallelogram",
        };
        write!(f, "{s}(c=({},{}),r={})", self.center[0], self.center[1], self.r)
    }
}

/// Lattice geometry in double precision.
#[derive(Clone, Copy, Debug)]
struct Geometry {
    w1: Complex64,
    w2: Complex64,
    area: f64,
}

impl Geometry {
    fn new(lat: &PeriodLattice) -> Self {
        let (w1, w2) = (lat.omega1.to_c64(), lat.omega2.to_c64());
        Geometry { w1, w2, area: (w1.conj() * w2).im.abs() }
    }

    fn point(&self, c: [f64; 2]) -> Complex64 {
        self.w1 * c[0] + self.w2 * c[1]
    }

    /// Shortest nonzero lattice vector.
    fn min_norm(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in -3i32..=3 {
            for j in -3i32..=3 {
                if (i, j) != (0, 0) {
                    best = best.min(self.point([i as f64, j as f64]).norm());
                }
            }
        }
        best
    }

    /// Radius of the smallest disc about 0 holding the centered parallelogram.
    fn parallelogram_radius(&self) -> f64 {
        (self.w1 + self.w2).norm().max((self.w1 - self.w2).norm()) / 2.0
    }
}

impl ConvexRegion {
    pub fn new(shape: RegionShape, center: [f64; 2], r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) || !center.iter().all(|c| c.is_finite()) {
            return Err(LabError::pre("region scale must be positive and the center finite"));
        }
        Ok(ConvexRegion { shape, center, r })
    }

    /// Injectivity radius r₀: half the least gauge of a nonzero period.
    pub fn injectivity_radius(&self, lat: &PeriodLattice) -> f64 {
        match self.shape {
            RegionShape::Disc => Geometry::new(lat).min_norm() / 2.0,
            RegionShape::Parallelogram => 1.0,
        }
    }

    /// Fails unless 𝒮(a, r) injects into C/Λ. The disc is closed, so it
    /// needs r < r₀; the half-open parallelogram allows r = r₀.
    pub fn check_injective(&self, lat: &PeriodLattice) -> Result<()> {
        let r0 = self.injectivity_radius(lat);
        let ok = match self.shape {
            RegionShape::Disc => self.r < r0,
            RegionShape::Parallelogram => self.r <= r0,
        };
        if ok {
            Ok(())
        } else {
            Err(LabError::pre(format!("region {self} does not inject into C/Lambda: r/r0 = {}", self.r / r0)))
        }
    }

    /// (C, S): 𝒮 ⊃ centered fundamental domain scaled by 1/C, S = area(𝒮).
    fn shape_constants(&self, g: &Geometry) -> (f64, f64) {
        match self.shape {
            RegionShape::Disc => (g.parallelogram_radius(), std::f64::consts::PI),
            RegionShape::Parallelogram => (1.0, g.area),
        }
    }

    /// Membership of the class of the period-coordinate point c modulo Λ.
    fn contains_mod(&self, g: &Geometry, c: [f64; 2]) -> bool {
        let d = [c[0] - self.center[0], c[1] - self.center[1]];
        match self.shape {
            RegionShape::Parallelogram => d.iter().all(|x| (x + self.r / 2.0).rem_euclid(1.0) < self.r),
            RegionShape::Disc => {
                let red = [d[0] - d[0].round(), d[1] - d[1].round()];
                let mut best = f64::INFINITY;
                for i in -2..=2 {
                    for j in -2..=2 {
                        best = best.min(g.point([red[0] + i as f64, red[1] + j as f64]).norm());
                    }
                }
                best <= self.r
            }
        }
    }

    /// Membership of an actual point of C given by period coordinates.
    fn contains_planar(&self, g: &Geometry, c: [f64; 2]) -> bool {
        let d = [c[0] - self.center[0], c[1] - self.center[1]];
        match self.shape {
            RegionShape::Parallelogram => d.iter().all(|x| -self.r / 2.0 <= *x && *x < self.r / 2.0),
            RegionShape::Disc => g.point(d).norm() <= self.r,
        }
    }

    /// Half-widths of the region in period coordinates.
    fn coordinate_extent(&self, g: &Geometry) -> [f64; 2] {
        match self.shape {
            RegionShape::Parallelogram => [self.r / 2.0; 2],
            RegionShape::Disc => [self.r * g.w2.norm() / g.area, self.r * g.w1.norm() / g.area],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionCountReport {
    pub n: u64,
    pub region: String,
    pub orbit_size: u64,
    /// Orbit points in the region, by enumeration modulo Λ.
    pub count: i64,
    /// Same count by inclusion–exclusion over planar lattice points.
    pub inclusion_exclusion: i64,
    pub expected: f64,
    pub error: f64,
    /// (2CSr/F)·N·Π(1 + 1/p) + (C²S/F)·2^R.
    pub bound: f64,
    /// |error| / bound.
    pub normalized_error: f64,
}

/// Points of the lattice (d/n)Λ lying in 𝒮(a, r) ⊂ C.
fn planar_lattice_count(region: &ConvexRegion, g: &Geometry, d: u64, n: u64) -> i64 {
    let t = d as f64 / n as f64;
    let ext = region.coordinate_extent(g);
    let range = |i: usize| {
        let lo = ((region.center[i] - ext[i]) / t).floor() as i64 - 1;
        let hi = ((region.center[i] + ext[i]) / t).ceil() as i64 + 1;
        lo..=hi
    };
    let mut count = 0;
    for m1 in range(0) {
        for m2 in range(1) {
            if region.contains_planar(g, [(m1 * d as i64) as f64 / n as f64, (m2 * d as i64) as f64 / n as f64]) {
                count += 1;
            }
        }
    }
    count
}

/// Number of primitive N-torsion lattice fractions in 𝒮(a, r) modulo Λ.
pub fn orbit_region_count(lat: &PeriodLattice, n: u64, region: &ConvexRegion) -> Result<RegionCountReport> {
    if n == 0 {
        return Err(LabError::pre("N must be positive"));
    }
    region.check_injective(lat)?;
    let g = Geometry::new(lat);
    let orbit = primitive_orbit(n);
    let nf = n as f64;
    let count = orbit
        .iter()
        .filter(|(l1, l2)| region.contains_mod(&g, [*l1 as f64 / nf, *l2 as f64 / nf]))
        .count() as i64;
    let primes = distinct_primes(n);
    let radical: u64 = primes.iter().product();
    let inclusion_exclusion: i64 = divisors(radical)
        .iter()
        .map(|&d| moebius(d) as i64 * planar_lattice_count(region, &g, d, n))
        .sum();
    let (c, s) = region.shape_constants(&g);
    let mu = region.r * region.r * s / g.area;
    let expected = mu * orbit.len() as f64;
    let sigma: f64 = primes.iter().map(|&p| 1.0 + 1.0 / p as f64).product();
    let bound = 2.0 * c * s * region.r / g.area * nf * sigma + c * c * s / g.area * 2f64.powi(primes.len() as i32);
    let error = count as f64 - expected;
    Ok(RegionCountReport {
        n,
        region: region.to_string(),
        orbit_size: orbit.len() as u64,
        count,
        inclusion_exclusion,
        expected,
        error,
        bound,
        normalized_error: error.abs() / bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeProfile {
    pub n: u64,
    pub degree: usize,
    /// Irreducible factor degrees of f_N; None past the factoring cap.
    pub factor_degrees: Option<Vec<usize>>,
    /// [Q(P):Q] for a point over the smallest factor: d or 2d.
    pub min_point_degree: Option<usize>,
    /// The y-coordinate was shown to need a quadratic extension by a
    /// nonsquare modulo a split prime.
    pub y_extension_certified: bool,
    /// min_point_degree / N².
    pub ratio_n2: Option<f64>,
    /// min_point_degree·(log log N)² / N, for N ≥ 3.
    pub ratio_cm: Option<f64>,
}

pub const DEGREE_FACTOR_CAP: usize = 60;
const Y_SPLIT_PRIMES: usize = 400;

/// Does (2y + a1x + a3)² = R(x) force a quadratic extension over Q(x0) for a
/// root x0 of g? A root r of g mod p with R(r) a nonsquare proves it.
fn y_needs_extension(e: &WeierstrassCurve, g: &crate::arith::poly::IntPolynomial) -> bool {
    let rpoly = crate::arith::poly::IntPolynomial::new(vec![
        e.b6.clone(),
        2 * &e.b4,
        e.b2.clone(),
        4.into(),
    ]);
    let disc_primes: Vec<u64> = e.bad_primes().iter().map(|b| b.p).collect();
    for p in primes_up_to(4000).into_iter().skip(1).take(Y_SPLIT_PRIMES) {
        let p = p as u64;
        if disc_primes.contains(&p) {
            continue;
        }
        let gm = PolyMod::new(p, g.reduce_mod(p));
        if gm.deg() != g.deg() || !gm.is_squarefree() {
            continue;
        }
        let rm = PolyMod::new(p, rpoly.reduce_mod(p));
        for r in roots(&gm, p) {
            let v = rm.eval(r);
            if v != 0 && !is_square_mod(v, p) {
                return true;
            }
        }
    }
    false
}

pub fn degree_profile(e: &WeierstrassCurve, n: u64) -> Result<DegreeProfile> {
    if !(2..=crate::elliptic::division::MAX_DIVISION_ORDER).contains(&n) {
        return Err(LabError::pre(format!("N = {n} outside 2..={}", crate::elliptic::division::MAX_DIVISION_ORDER)));
    }
    let f = DivisionTower::new(e).primitive(n)?;
    let degree = f.deg();
    let nf = n as f64;
    let mut out = DegreeProfile {
        n,
        degree,
        factor_degrees: None,
        min_point_degree: None,
        y_extension_certified: false,
        ratio_n2: None,
        ratio_cm: None,
    };
    if degree > DEGREE_FACTOR_CAP {
        return Ok(out);
    }
    let z = factor_z(&f);
    let degs = z.degrees();
    let (gmin, _) = z.factors.iter().min_by_key(|(g, _)| g.deg()).unwrap();
    let ext = n > 2 && y_needs_extension(e, gmin);
    let d = gmin.deg() * if ext { 2 } else { 1 };
    out.factor_degrees = Some(degs);
    out.min_point_degree = Some(d);
    out.y_extension_certified = ext;
    out.ratio_n2 = Some(d as f64 / (nf * nf));
    if n >= 3 {
        out.ratio_cm = Some(d as f64 * nf.ln().ln().powi(2) / nf);
    }
    Ok(out)
}

/// The B₂ profile ½B₂(i/m)·m·log p over the components i = 0..m−1 at a prime
/// of multiplicative reduction, m = −ord_p(j).
pub fn tate_loop_profile(e: &WeierstrassCurve, p: u64) -> Result<Vec<TateLocalData>> {
    let red = e.reduction_at(p);
    if !red.is_multiplicative() {
        return Err(LabError::UnsupportedReduction { p, kind: red.to_string() });
    }
    let ordj = crate::arith::factor::valuation(e.j.denom(), p) as u32;
    if ordj == 0 {
        return Err(LabError::inv(format!("multiplicative reduction at {p} but ord_p(j) >= 0")));
    }
    Ok((0..ordj).map(|i| TateLocalData::new(p, ordj, i)).collect())
}

/// Σ_{i<m} B₂(i/m), which equals 1/(6m).
pub fn bernoulli_component_sum(m: i64) -> Ratio<i64> {
    (0..m).map(|i| bernoulli2(Ratio::new(i, m))).sum()
}

/// ∫₀¹ B₂(t) dt from the antiderivative t³/3 − t²/2 + t/6.
pub fn bernoulli2_integral() -> Ratio<i64> {
    let prim = |t: Ratio<i64>| t * t * t / 3 - t * t / 2 + t / 6;
    prim(Ratio::from_integer(1)) - prim(Ratio::from_integer(0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LoopDistribution {
    pub m: u64,
    pub n: u64,
    pub k: u64,
    /// r(ξ) = j·m/N for j = 0..N−1, each of mass 1/N.
    #[serde(serialize_with = "crate::ser::display_vec")]
    pub support: Vec<Ratio<i64>>,
    #[serde(serialize_with = "crate::ser::display_vec")]
    pub bin_masses: Vec<Ratio<i64>>,
    #[serde(serialize_with = "crate::ser::display")]
    pub tv: Ratio<i64>,
    pub tv_f64: f64,
}

/// Distribution of r(ζ_N^a q^{j/N}) on R/mZ with total-variation distance to
/// the uniform measure, binned into K arcs of length m/K.
pub fn tate_component_distribution(m: u64, n: u64, k: u64) -> Result<LoopDistribution> {
    if m == 0 || n == 0 || k == 0 || k > n {
        return Err(LabError::pre("need m >= 1, N >= 1 and 1 <= K <= N"));
    }
    let (mi, ni, ki) = (m as i64, n as i64, k as i64);
    let support: Vec<Ratio<i64>> = (0..ni).map(|j| Ratio::new(j * mi, ni)).collect();
    let mut counts = vec![0i64; k as usize];
    for j in 0..ni {
        counts[(j * ki / ni) as usize] += 1;
    }
    let bin_masses: Vec<Ratio<i64>> = counts.iter().map(|&c| Ratio::new(c, ni)).collect();
    let uniform = Ratio::new(1, ki);
    let tv: Ratio<i64> = bin_masses.iter().map(|&b| (b - uniform).abs()).sum::<Ratio<i64>>() / 2;
    let tv_f64 = *tv.numer() as f64 / *tv.denom() as f64;
    Ok(LoopDistribution { m, n, k, support, bin_masses, tv, tv_f64 })
}

/// g(N) = min_{l1,l2} |z − (l1ω1 + l2ω2)/N| modulo Λ, which is dist(Nz, Λ)/N.
pub fn lattice_gap_scan(lat: &PeriodLattice, z: Cdd, n_max: u64) -> GapReport {
    let rows: Vec<GapRow> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let nd = Dd::from_f64(n as f64);
            let gap = (lat.distance_to_lattice(z.scale(nd)) / nd).to_f64();
            GapRow { n, gap, ratio: gap_ratio(n, gap) }
        })
        .collect();
    GapReport::from_rows(None, rows)
}

pub fn elliptic_gap_scan(e: &WeierstrassCurve, lat: &PeriodLattice, alpha: &CurvePoint, n_max: u64) -> Result<GapReport> {
    if n_max < 1 {
        return Err(LabError::pre("N_max must be positive"));
    }
    if let Some(k) = e.torsion_order(alpha)? {
        return Err(LabError::GapVanishes(format!("alpha has order {k}")));
    }
    let z = elliptic_log(e, lat, alpha)?;
    let report = lattice_gap_scan(lat, z, n_max);
    if !report.all_positive() {
        return Err(LabError::inv(format!("gap vanished at N = {:?} for a nontorsion point", report.zero_at)));
    }
    Ok(report)
}

/// Fitted C over [1, n] and [1, 2n] and their relative change.
pub fn fitted_c_stability(report: &GapReport, n: u64) -> (f64, f64, f64) {
    let (a, b) = (report.fitted_c_upto(n), report.fitted_c_upto(2 * n));
    (a, b, (b - a).abs() / a)
}

/// N²Π(1 − 1/p²), the size of the primitive N-torsion orbit.
pub fn orbit_size(n: u64) -> u64 {
    let mut s = n * n;
    for p in distinct_primes(n) {
        s = s / (p * p) * (p * p - 1);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat37() -> PeriodLattice {
        PeriodLattice::new(&WeierstrassCurve::from_i64([0, 0, 1, -1, 0]).unwrap()).unwrap()
    }

    #[test]
    fn full_parallelogram_holds_the_orbit() {
        let lat = lat37();
        let r = orbit_region_count(&lat, 5, &ConvexRegion::new(RegionShape::Parallelogram, [0.0, 0.0], 1.0).unwrap())
            .unwrap();
        assert_eq!((r.count, r.inclusion_exclusion, r.orbit_size), (24, 24, 24));
    }

    #[test]
    fn oversized_disc_is_rejected() {
        let lat = lat37();
        let reg = ConvexRegion::new(RegionShape::Disc, [0.1, 0.2], 10.0).unwrap();
        assert!(orbit_region_count(&lat, 5, &reg).is_err());
    }

    #[test]
    fn bernoulli_identities() {
        for m in 1..=50 {
            assert_eq!(bernoulli_component_sum(m), Ratio::new(1, 6 * m));
        }
        assert_eq!(bernoulli2_integral(), Ratio::from_integer(0));
    }

    #[test]
    fn tate_profile_of_11a() {
        let e = WeierstrassCurve::from_i64([0, -1, 1, 0, 0]).unwrap();
        let t = tate_loop_profile(&e, 11).unwrap();
        assert_eq!(t.len(), 1);
        assert!((t[0].value - 11f64.ln() / 12.0).abs() < 1e-15);
        assert!(tate_loop_profile(&e, 3).is_err());
    }

    #[test]
    fn loop_distribution_small_cases() {
        let d = tate_component_distribution(1, 5, 5).unwrap();
        assert_eq!(d.support, (0..5).map(|j| Ratio::new(j, 5)).collect::<Vec<_>>());
        assert_eq!(d.tv, Ratio::from_integer(0));
        let d = tate_component_distribution(1, 1, 1).unwrap();
        assert_eq!(d.bin_masses, vec![Ratio::from_integer(1)]);
        let d = tate_component_distribution(2, 7, 3).unwrap();
        assert!(d.tv > Ratio::from_integer(0));
    }

    #[test]
    fn division_degree_two_on_37a() {
        let e = WeierstrassCurve::from_i64([0, 0, 1, -1, 0]).unwrap();
        let d = degree_profile(&e, 2).unwrap();
        assert_eq!(d.factor_degrees, Some(vec![3]));
        assert_eq!(d.min_point_degree, Some(3));
        let c = WeierstrassCurve::from_i64([0, 0, 0, -1, 0]).unwrap();
        assert_eq!(degree_profile(&c, 2).unwrap().factor_degrees, Some(vec![1, 1, 1]));
    }

    #[test]
    fn torsion_gap_vanishes_at_its_order() {
        let e = WeierstrassCurve::from_i64([0, -1, 1, 0, 0]).unwrap();
        let lat = PeriodLattice::new(&e).unwrap();
        let p = CurvePoint::from_i64(0, 0);
        assert!(matches!(elliptic_gap_scan(&e, &lat, &p, 10), Err(LabError::GapVanishes(_))));
        let z = elliptic_log(&e, &lat, &p).unwrap();
        let r = lattice_gap_scan(&lat, z, 12);
        assert_eq!(r.zero_at, vec![5, 10]);
    }
}
