//! One runner per command. Each produces a [`ReportBundle`]; nothing here
//! touches the file system.

use crate::config::{parse_config, Command, ScanConfig};
use crate::error::CliError;
use crate::report::{exact, float, fmt_f64, text, ReportBundle, Table};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use std::f64::consts::TAU;
use torsion_core::circle::{arc_discrepancy, baker_gap_scan, sample_unit_alpha, ArcInterval, GapReport};
use torsion_core::elliptic::CurvePoint;
use torsion_core::equidist::{
    bernoulli2_integral, bernoulli_component_sum, degree_profile, elliptic_gap_scan, orbit_region_count,
    tate_component_distribution, tate_loop_profile, ConvexRegion, RegionShape,
};
use torsion_core::heights::local::bernoulli2;
use torsion_core::heights::scan::{integral_torsion_orders, TORSION_ALPHA_MSG, TORSION_SCAN_RHO_BUDGET};
use torsion_core::heights::{
    canonical_height, s_integral_torsion_scan, torsion_average_series, EllipticContext,
};
use torsion_core::mulgroup::{integral_orders, place_decomposition, s_integral_scan};

const MAX_DIVISION_ORDER: u64 = 30;
const DEFAULT_GAP_N: u64 = 400;
const DEFAULT_LOOP_N: u64 = 1000;
const C_STABILITY: f64 = 0.25;
const QUADRATIC_TOL: f64 = 1e-6;

fn parameters(cfg: &ScanConfig, command: Command) -> serde_json::Value {
    json!({
        "command": command.name(),
        "alpha": cfg.alpha.as_ref().map(|a| a.to_string()),
        "curve": cfg.curve.as_ref().map(|e| e.descriptor()),
        "alpha_point": cfg.alpha_point.as_ref().map(|p| p.to_string()),
        "S": cfg.s.primes().collect::<Vec<_>>(),
        "n_min": cfg.n_min,
        "n_max": cfg.n_max,
        "N_max": cfg.big_n_max,
        "p": cfg.p,
        "m": cfg.m,
        "K": cfg.k,
        "arcs": cfg.arcs,
        "regions": cfg.regions,
        "seed": cfg.seed,
        "epsilon": cfg.epsilon,
        "tol": cfg.tol,
        "D": cfg.annulus_d,
    })
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

fn curve_of(cfg: &ScanConfig, command: Command) -> Result<EllipticContext, CliError> {
    let e = cfg.curve.clone().ok_or_else(|| CliError::Config(vec![format!("{command} needs a curve")]))?;
    EllipticContext::new(e).map_err(CliError::lab(command))
}

fn point_of(cfg: &ScanConfig, command: Command) -> Result<CurvePoint, CliError> {
    cfg.alpha_point
        .clone()
        .ok_or_else(|| CliError::Config(vec![format!("{command} needs alpha_point")]))
}

/// Run `command` on a validated configuration.
pub fn run(command: Command, cfg: &ScanConfig) -> Result<ReportBundle, CliError> {
    cfg.require(command)?;
    let mut b = ReportBundle::new(command.name(), parameters(cfg, command));
    match command {
        Command::MulScan => mul_scan(cfg, &mut b)?,
        Command::MulDecompose => mul_decompose(cfg, &mut b)?,
        Command::CircleDiscrepancy => circle_discrepancy(cfg, &mut b)?,
        Command::BakerGap => baker_gap(cfg, &mut b)?,
        Command::EcHeight => ec_height(cfg, &mut b)?,
        Command::EcTorsionScan => ec_torsion_scan(cfg, &mut b)?,
        Command::EcEquidist => ec_equidist(cfg, &mut b)?,
        Command::TateProfile => tate_profile(cfg, &mut b)?,
        Command::Selftest => selftest(&mut b)?,
    }
    Ok(b)
}

fn mul_scan(cfg: &ScanConfig, b: &mut ReportBundle) -> Result<(), CliError> {
    let cmd = Command::MulScan;
    let alpha = cfg.alpha.as_ref().unwrap().to_algebraic().map_err(CliError::lab(cmd))?;
    let n_max = cfg.n_max.unwrap();
    let ns: Vec<u64> = (cfg.n_min..=n_max).collect();
    let verdicts = s_integral_scan(&alpha, &cfg.s, &ns).map_err(CliError::lab(cmd))?;
    let mut t = Table::new(
        "verdicts",
        vec![exact("n"), exact("integral"), text("collision_primes"), exact("witness_degrees"), exact("resultant"), exact("unfactored")],
    );
    let mut consistent = true;
    for v in &verdicts {
        let outside = v.collision_primes.iter().any(|c| !cfg.s.contains_prime(&c.prime.clone().into()));
        consistent &= v.integral == (!outside && v.unfactored.is_none());
        let w: Vec<usize> = v.collision_primes.iter().map(|c| c.witness_degree).collect();
        t.push(vec![
            v.n.to_string(),
            v.integral.to_string(),
            join(&v.prime_list()),
            join(&w),
            v.resultant.to_string(),
            v.unfactored.as_ref().map(|u| u.to_string()).unwrap_or_default(),
        ]);
    }
    let integral = integral_orders(&verdicts);
    let stabilized = integral.iter().all(|&n| 2 * n <= n_max);
    b.line(format!("integral n: {integral:?}; {}", if stabilized { "stabilized" } else { "not stabilized" }));
    b.check(
        "collision witnesses",
        verdicts.iter().all(|v| v.collision_primes.iter().all(|c| c.witness_degree > 0)),
        "every collision prime has a nontrivial gcd witness",
    );
    b.check("verdict matches collision set", consistent, "integral iff all collision primes lie in S");
    b.set_result(&json!({ "integral": integral, "stabilized": stabilized, "verdicts": verdicts }))?;
    b.tables.push(t);
    Ok(())
}

fn mul_decompose(cfg: &ScanConfig, b: &mut ReportBundle) -> Result<(), CliError> {
    let cmd = Command::MulDecompose;
    let alpha = cfg.alpha_rational(cmd)?;
    let ns: Vec<u64> = (cfg.n_min..=cfg.n_max.unwrap()).collect();
    let rows = ns
        .par_iter()
        .map(|&n| place_decomposition(&alpha, n))
        .collect::<torsion_core::Result<Vec<_>>>()
        .map_err(CliError::lab(cmd))?;
    let mut t = Table::new(
        "decomposition",
        vec![exact("n"), text("place"), exact("ord"), float("contribution", Some(cfg.tol))],
    );
    let mut worst = 0.0f64;
    for d in &rows {
        t.push(vec![d.n.to_string(), "inf".into(), String::new(), fmt_f64(d.arch_log)]);
        for f in &d.finite {
            t.push(vec![d.n.to_string(), f.prime.to_string(), f.ord.to_string(), fmt_f64(f.log_contribution)]);
        }
        if let Some(u) = &d.unfactored {
            t.push(vec![d.n.to_string(), format!("[{u}]"), "1".into(), String::new()]);
        }
        worst = worst.max(d.total_float.abs());
    }
    let failures: Vec<u64> = rows.iter().filter(|d| !d.total_is_zero).map(|d| d.n).collect();
    b.line(format!("orders: {}..={}; max |float total| = {worst:.3e}", cfg.n_min, cfg.n_max.unwrap()));
    b.check("product formula (exact)", failures.is_empty(), format!("failing n: {failures:?}"));
    b.check("product formula (float)", worst <= cfg.tol, format!("max |sum| = {worst:.3e} <= tol {}", cfg.tol));
    b.set_result(&rows)?;
    b.tables.push(t);
    Ok(())
}

fn random_arcs(seed: u64, count: usize) -> Vec<ArcInterval> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let t1: f64 = rng.gen_range(0.0..TAU);
            let len = (1.0 - rng.gen::<f64>()) * (TAU - 1e-9);
            ArcInterval::new(t1, t1 + len).expect("length in (0, 2 pi]")
        })
        .collect()
}

fn circle_discrepancy(cfg: &ScanConfig, b: &mut ReportBundle) -> Result<(), CliError> {
    let cmd = Command::CircleDiscrepancy;
    let arcs = random_arcs(cfg.seed, cfg.arcs);
    let ns: Vec<u64> = (cfg.n_min..=cfg.n_max.unwrap()).collect();
    let reports = ns
        .par_iter()
        .map(|&n| arc_discrepancy(n, &arcs))
        .collect::<torsion_core::Result<Vec<_>>>()
        .map_err(CliError::lab(cmd))?;
    let mut t = Table::new(
        "discrepancy",
        vec![
            exact("n"),
            float("theta1", None),
            float("theta2", None),
            exact("count"),
            float("expected", Some(1e-9)),
            float("error", Some(1e-9)),
            exact("bound"),
        ],
    );
    let (mut bad, mut worst) = (0usize, 0.0f64);
    for r in reports.iter().flatten() {
        if !r.within_bound() {
            bad += 1;
        }
        worst = worst.max(r.error.abs() / r.bound as f64);
        t.push(vec![
            r.n.to_string(),
            fmt_f64(r.arc.theta1),
            fmt_f64(r.arc.theta2),
            r.count.to_string(),
            fmt_f64(r.expected),
            fmt_f64(r.error),
            r.bound.to_string(),
        ]);
    }
    b.line(format!("{} arcs x {} orders; max |error|/d(n) = {worst:.6}", arcs.len(), ns.len()));
    b.check("discrepancy within d(n)", bad == 0, format!("{bad} violations"));
    b.set_result(&json!({ "max_normalized_error": worst, "violations": bad }))?;
    b.tables.push(t);
    Ok(())
}

fn gap_table(name: &str, report: &GapReport) -> Table {
    let mut t = Table::new(name, vec![exact("N"), float("gap", None), float("log_inv_gap_over_log_N", None)]);
    for r in &report.rows {
        t.push(vec![r.n.to_string(), fmt_f64(r.gap), fmt_f64(r.ratio)]);
    }
    t
}

fn gap_checks(b: &mut ReportBundle, report: &GapReport, n_max: u64) {
    b.check("gaps positive", report.all_positive(), format!("zero at {:?}", report.zero_at));
    let half = (n_max / 2).max(1);
    let (c1, c2) = (report.fitted_c_upto(half), report.fitted_c_upto(n_max));
    let rel = if c1 > 0.0 { (c2 - c1).abs() / c1 } else { 0.0 };
    b.line(format!("fitted C: {c1:.6} up to {half}, {c2:.6} up to {n_max}"));
    b.check("fitted C stable", rel <= C_STABILITY, format!("relative change {rel:.4} <= {C_STABILITY}"));
}

fn baker_gap(cfg: &ScanConfig, b: &mut ReportBundle) -> Result<(), CliError> {
    let cmd = Command::BakerGap;
    let alpha = match &cfg.alpha {
        Some(a) => a.to_algebraic().map_err(CliError::lab(cmd))?,
        None => sample_unit_alpha(),
    };
    let n_max = cfg.big_n_max.unwrap();
    let report = baker_gap_scan(&alpha, n_max).map_err(CliError::lab(cmd))?;
    gap_checks(b, &report, n_max);
    b.tables.push(gap_table("gaps", &report));
    b.set_result(&json!({ "theta0": report.theta0, "fitted_c": report.fitted_c, "zero_at": report.zero_at }))?;
    Ok(())
}

fn ec_height(cfg: &ScanConfig, b: &mut ReportBundle) -> Result<(), CliError> {
    let cmd = Command::EcHeight;
    let ctx = curve_of(cfg, cmd)?;
    let p = point_of(cfg, cmd)?;
    ctx.curve.check(&p).map_err(CliError::lab(cmd))?;
    let order = ctx.curve.torsion_order(&p).map_err(CliError::lab(cmd))?;
    let mut t = Table::new("local_heights", vec![text("place"), float("lambda", Some(cfg.tol)), text("method")]);
    if let Some(k) = order {
        let (sum, local) = ctx.height_sum(&p).map_err(CliError::lab(cmd))?;
        for l in &local {
            t.push(vec![l.place.to_string(), fmt_f64(l.value), format!("{:?}", l.method)]);
        }
        b.line(format!("point of order {k}: height {sum:.3e}"));
        b.line(format!("integrality scan refused: {TORSION_ALPHA_MSG}"));
        b.check("torsion height vanishes", sum.abs() < cfg.tol, format!("|h| = {:.3e} < {}", sum.abs(), cfg.tol));
        b.set_result(&json!({
            "point": p.to_string(), "torsion_order": k, "sum": sum, "local": local,
            "scan_refused": TORSION_ALPHA_MSG,
        }))?;
    } else {
        let r = canonical_height(&ctx, &p).map_err(CliError::lab(cmd))?;
        for l in &r.local {
            t.push(vec![l.place.to_string(), fmt_f64(l.value), format!("{:?}", l.method)]);
        }
        let h2 = ctx.height(&ctx.curve.double(&p)).map_err(CliError::lab(cmd))?;
        let quad = (h2 - 4.0 * r.sum_value).abs();
        b.line(format!("height {:.15} (sum), {:.15} (limit, {} doublings)", r.sum_value, r.limit_value, r.limit_doublings));
        let allowed = cfg.tol.max(r.limit_tail_bound);
        b.check("sum and limit agree", r.delta <= allowed, format!("delta {:.3e} <= {allowed:.3e}", r.delta));
        b.check("quadratic under doubling", quad <= QUADRATIC_TOL * r.sum_value.max(1.0), format!("|h(2P) - 4h(P)| = {quad:.3e}"));
        b.set_result(&r)?;
    }
    b.tables.push(t);
    Ok(())
}

fn ec_torsion_scan(cfg: &ScanConfig, b: &mut ReportBundle) -> Result<(), CliError> {
    let cmd = Command::EcTorsionScan;
    let ctx = curve_of(cfg, cmd)?;
    let p = point_of(cfg, cmd)?;
    let n_max = cfg.big_n_max.unwrap();
    if n_max > MAX_DIVISION_ORDER {
        return Err(CliError::Config(vec![format!("N_max must be at most {MAX_DIVISION_ORDER}")]));
    }
    let verdicts = s_integral_torsion_scan(&ctx, &p, &cfg.s, n_max).map_err(CliError::lab(cmd))?;
    let mut t = Table::new(
        "torsion_verdicts",
        vec![exact("N"), text("collision_primes"), text("kinds"), exact("integral"), exact("deg_f_N")],
    );
    let mut s = cfg.s.clone();
    for bp in &ctx.bad {
        s.insert(bp.p);
    }
    let mut consistent = true;
    for v in &verdicts {
        let outside = v.collision_primes.iter().any(|c| !s.contains_prime(&c.prime.clone().into()));
        consistent &= v.integral == (!outside && v.unfactored.is_none());
        let kinds: Vec<String> = v.collision_primes.iter().map(|c| format!("{:?}", c.kind)).collect();
        t.push(vec![v.n.to_string(), join(&v.prime_list()), join(&kinds), v.integral.to_string(), v.degree.to_string()]);
    }
    let ns: Vec<u64> = (1..=n_max).collect();
    let averages = torsion_average_series(&ctx, &p, &ns, cfg.annulus_d).map_err(CliError::lab(cmd))?;
    let mut a = Table::new(
        "torsion_averages",
        vec![
            exact("N"),
            exact("orbit_size"),
            float("average", None),
            float("max", None),
            float("min", None),
            float("D", None),
            exact("near_count"),
            float("near_sum", None),
        ],
    );
    for r in &averages {
        a.push(vec![
            r.n.to_string(),
            r.orbit_size.to_string(),
            fmt_f64(r.average),
            fmt_f64(r.max),
            fmt_f64(r.min),
            fmt_f64(r.d),
            r.near_count.to_string(),
            fmt_f64(r.near_sum),
        ]);
    }
    let integral = integral_torsion_orders(&verdicts);
    b.line(format!("S enlarged by bad primes: {:?}", s.primes().collect::<Vec<_>>()));
    b.line(format!("integral N: {integral:?}"));
    b.check(
        "collision witnesses",
        verdicts.iter().all(|v| v.collision_primes.iter().all(|c| c.witness_degree > 0)),
        format!("rho budget {TORSION_SCAN_RHO_BUDGET}"),
    );
    b.check("verdict matches collision set", consistent, "integral iff all collision primes lie in S");
    b.set_result(&json!({ "integral": integral, "verdicts": verdicts, "averages": averages }))?;
    b.tables.push(t);
    b.tables.push(a);
    Ok(())
}

fn random_regions(ctx: &EllipticContext, seed: u64, count: usize) -> Vec<ConvexRegion> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let shape = if i % 2 == 0 { RegionShape::Parallelogram } else { RegionShape::Disc };
            let center = [rng.gen::<f64>(), rng.gen::<f64>()];
            let r0 = ConvexRegion::new(shape, center, 1.0).expect("unit radius").injectivity_radius(&ctx.lattice);
            // strictly inside (0, r0)
            let r = r0 * (0.05 + 0.9 * rng.gen::<f64>());
            ConvexRegion::new(shape, center, r).expect("positive radius")
        })
        .collect()
}

fn ec_equidist(cfg: &ScanConfig, b: &mut ReportBundle) -> Result<(), CliError> {
    let cmd = Command::EcEquidist;
    let ctx = curve_of(cfg, cmd)?;
    let n_max = cfg.big_n_max.unwrap();
    let regions = random_regions(&ctx, cfg.seed, cfg.regions);
    let jobs: Vec<(u64, &ConvexRegion)> = (1..=n_max).flat_map(|n| regions.iter().map(move |r| (n, r))).collect();
    let reports = jobs
        .par_iter()
        .map(|(n, r)| orbit_region_count(&ctx.lattice, *n, r))
        .collect::<torsion_core::Result<Vec<_>>>()
        .map_err(CliError::lab(cmd))?;
    let mut t = Table::new(
        "region_counts",
        vec![
            exact("N"),
            text("region"),
            exact("count"),
            exact("inclusion_exclusion"),
            float("expected", Some(1e-9)),
            float("error", Some(1e-9)),
            float("bound", None),
        ],
    );
    let (mut mismatch, mut over, mut worst) = (0usize, 0usize, 0.0f64);
    for r in &reports {
        mismatch += usize::from(r.count != r.inclusion_exclusion);
        over += usize::from(r.error.abs() > r.bound + 1e-9);
        worst = worst.max(r.normalized_error);
        t.push(vec![
            r.n.to_string(),
            r.region.clone(),
            r.count.to_string(),
            r.inclusion_exclusion.to_string(),
            fmt_f64(r.expected),
            fmt_f64(r.error),
            fmt_f64(r.bound),
        ]);
    }
    b.line(format!("{} regions x {n_max} orders; max |error|/bound = {worst:.6}", regions.len()));
    b.check("enumeration matches inclusion-exclusion", mismatch == 0, format!("{mismatch} mismatches"));
    b.check("count error within bound", over == 0, format!("{over} violations"));
    b.tables.push(t);

    let top = n_max.min(MAX_DIVISION_ORDER);
    let profiles = (2..=top)
        .into_par_iter()
        .map(|n| degree_profile(&ctx.curve, n))
        .collect::<torsion_core::Result<Vec<_>>>()
        .map_err(CliError::lab(cmd))?;
    let mut d = Table::new(
        "degree_profile",
        vec![
            exact("N"),
            exact("deg_f_N"),
            text("factor_degrees"),
            exact("min_point_degree"),
            exact("y_extension_certified"),
            float("ratio_n2", None),
            float("ratio_cm", None),
        ],
    );
    let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
    for p in &profiles {
        d.push(vec![
            p.n.to_string(),
            p.degree.to_string(),
            p.factor_degrees.as_deref().map(join).unwrap_or_default(),
            p.min_point_degree.map(|x| x.to_string()).unwrap_or_default(),
            p.y_extension_certified.to_string(),
            opt(p.ratio_n2),
            opt(p.ratio_cm),
        ]);
    }
    let factor_ok = profiles.iter().all(|p| p.factor_degrees.as_ref().map_or(true, |f| f.iter().sum::<usize>() == p.degree));
    b.check("factor degrees sum to deg f_N", factor_ok, format!("N = 2..={top}"));
    b.tables.push(d);

    let mut gaps = None;
    if let Some(alpha) = &cfg.alpha_point {
        let gn = cfg.n_max.unwrap_or(DEFAULT_GAP_N);
        let report = elliptic_gap_scan(&ctx.curve, &ctx.lattice, alpha, gn).map_err(CliError::lab(cmd))?;
        gap_checks(b, &report, gn);
        b.tables.push(gap_table("elliptic_gaps", &report));
        gaps = Some(json!({ "fitted_c": report.fitted_c, "zero_at": report.zero_at }));
    }
    b.set_result(&json!({ "max_normalized_error": worst, "degree_profile": profiles, "gaps": gaps }))?;
    Ok(())
}

fn tate_profile(cfg: &ScanConfig, b: &mut ReportBundle) -> Result<(), CliError> {
    let cmd = Command::TateProfile;
    let ctx = curve_of(cfg, cmd)?;
    let p = cfg.p.unwrap();
    let profile = tate_loop_profile(&ctx.curve, p).map_err(CliError::lab(cmd))?;
    let m = cfg.m.unwrap_or(profile[0].m as u64);
    let mut t = Table::new(
        "tate_components",
        vec![exact("p"), exact("m"), exact("i"), exact("B2_i_over_m"), float("lambda", Some(1e-12))],
    );
    for d in &profile {
        let b2 = bernoulli2(Ratio::new(d.i as i64, d.m as i64));
        t.push(vec![d.p.to_string(), d.m.to_string(), d.i.to_string(), b2.to_string(), fmt_f64(d.value)]);
    }
    let sum = bernoulli_component_sum(m as i64);
    b.check("component sum", sum == Ratio::new(1, 6 * m as i64), format!("sum B2(i/{m}) = {sum}"));
    b.check("B2 integrates to zero", bernoulli2_integral() == Ratio::from_integer(0), "exact antiderivative");

    let n = cfg.big_n_max.unwrap_or(DEFAULT_LOOP_N);
    let k = cfg.k.min(n);
    let dist = tate_component_distribution(m, n, k).map_err(CliError::lab(cmd))?;
    let mut l = Table::new("loop", vec![exact("m"), exact("N"), exact("K"), exact("TV"), float("TV_float", None)]);
    l.push(vec![m.to_string(), n.to_string(), k.to_string(), dist.tv.to_string(), fmt_f64(dist.tv_f64)]);
    let cap = Ratio::new(k as i64, 2 * n as i64);
    b.line(format!("m = {m}; TV(N = {n}, K = {k}) = {}", dist.tv));
    b.check("TV below K/(2N)", dist.tv <= cap, format!("{} <= {cap}", dist.tv));
    if n % k == 0 {
        b.check("TV vanishes when K | N", dist.tv == Ratio::from_integer(0), format!("TV = {}", dist.tv));
    }
    b.set_result(&json!({ "profile": profile, "loop": dist }))?;
    b.tables.push(t);
    b.tables.push(l);
    Ok(())
}

/// Built-in configurations exercised by `selftest`.
pub const SELFTEST_SUITE: &[(&str, &str)] = &[
    ("mul-scan", "alpha = 2\nS = 2,3,7\nn_max = 60"),
    ("mul-decompose", "alpha = 3/2\nn_max = 40"),
    ("circle-discrepancy", "n_max = 60\narcs = 20\nseed = 7"),
    ("baker-gap", "N_max = 400"),
    ("ec-height", "curve = 0 0 1 -1 0\nalpha_point = 0,0"),
    ("ec-height", "curve = 0 -1 1 -10 -20\nalpha_point = 5,5"),
    ("ec-torsion-scan", "curve = 0 0 1 -1 0\nalpha_point = 0,0\nN_max = 6"),
    ("ec-equidist", "curve = 0 0 1 -1 0\nalpha_point = 0,0\nN_max = 8\nregions = 10\nn_max = 200"),
    ("tate-profile", "curve = 0 -1 1 -10 -20\np = 11\nN_max = 1000\nK = 4"),
];

fn selftest(b: &mut ReportBundle) -> Result<(), CliError> {
    let mut t = Table::new("selftest", vec![text("run"), text("check"), exact("pass"), text("detail")]);
    let mut results = Vec::new();
    for (i, (name, text_cfg)) in SELFTEST_SUITE.iter().enumerate() {
        let command: Command = name.parse().map_err(|e: String| CliError::Config(vec![e]))?;
        let cfg = parse_config(text_cfg)?;
        let sub = run(command, &cfg)?;
        let tag = format!("{i}:{name}");
        for c in &sub.invariants {
            t.push(vec![tag.clone(), c.name.clone(), c.pass.to_string(), c.detail.clone()]);
            b.check(&format!("{tag} {}", c.name), c.pass, c.detail.clone());
        }
        for l in &sub.summary {
            b.line(format!("{tag}: {l}"));
        }
        results.push(json!({ "run": tag, "summary": sub.summary, "invariants": sub.invariants }));
    }
    let mul = results[0]["summary"][0].as_str().unwrap_or_default().to_string();
    b.check("mul-scan integral list", mul.starts_with("integral n: [1, 2, 3, 6];"), mul);
    let torsion = results[5]["summary"].to_string();
    b.check("torsion point refused", torsion.contains(TORSION_ALPHA_MSG), "height flagged and scan refused");
    b.set_result(&results)?;
    b.tables.push(t);
    Ok(())
}
