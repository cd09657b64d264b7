//! Line-based `key = value` configuration.

use crate::error::CliError;
use num_complex::Complex64;
use num_rational::BigRational;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;
use torsion_core::arith::algebraic::{AlgebraicNumber, PlaceSet};
use torsion_core::arith::poly::IntPolynomial;
use torsion_core::elliptic::{CurvePoint, WeierstrassCurve};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Command {
    MulScan,
    MulDecompose,
    CircleDiscrepancy,
    BakerGap,
    EcHeight,
    EcTorsionScan,
    EcEquidist,
    TateProfile,
    Selftest,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::MulScan,
        Command::MulDecompose,
        Command::CircleDiscrepancy,
        Command::BakerGap,
        Command::EcHeight,
        Command::EcTorsionScan,
        Command::EcEquidist,
        Command::TateProfile,
        Command::Selftest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::MulScan => "mul-scan",
            Command::MulDecompose => "mul-decompose",
            Command::CircleDiscrepancy => "circle-discrepancy",
            Command::BakerGap => "baker-gap",
            Command::EcHeight => "ec-height",
            Command::EcTorsionScan => "ec-torsion-scan",
            Command::EcEquidist => "ec-equidist",
            Command::TateProfile => "tate-profile",
            Command::Selftest => "selftest",
        }
    }

    /// Keys that must be present for this command.
    pub fn required_keys(self) -> &'static [&'static str] {
        match self {
            Command::MulScan => &["alpha", "n_max"],
            Command::MulDecompose => &["alpha", "n_max"],
            Command::CircleDiscrepancy => &["n_max"],
            Command::BakerGap => &["N_max"],
            Command::EcHeight => &["curve", "alpha_point"],
            Command::EcTorsionScan => &["curve", "alpha_point", "N_max"],
            Command::EcEquidist => &["curve", "N_max"],
            Command::TateProfile => &["curve", "p"],
            Command::Selftest => &[],
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command '{s}'"))
    }
}

impl std::fmt::Display for Command {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// α as a rational or as a root of an integer polynomial.
#[derive(Clone, Debug, PartialEq)]
pub enum AlphaSpec {
    Rational(BigRational),
    /// Coefficients from the leading term down, with an approximation that
    /// selects the root.
    Minpoly { coeffs: Vec<i64>, approx: Complex64 },
}

impl AlphaSpec {
    pub fn to_algebraic(&self) -> torsion_core::Result<AlgebraicNumber> {
        match self {
            AlphaSpec::Rational(q) => Ok(AlgebraicNumber::from_rational(q)),
            AlphaSpec::Minpoly { coeffs, approx } => {
                let mut c = coeffs.clone();
                c.reverse();
                AlgebraicNumber::from_minpoly(&IntPolynomial::from_i64(&c), *approx)
            }
        }
    }

    pub fn rational(&self) -> Option<&BigRational> {
        match self {
            AlphaSpec::Rational(q) => Some(q),
            AlphaSpec::Minpoly { .. } => None,
        }
    }
}

impl std::fmt::Display for AlphaSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AlphaSpec::Rational(q) => write!(f, "{q}"),
            AlphaSpec::Minpoly { coeffs, approx } => {
                let c: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                write!(f, "root of [{}] near {}{:+}i", c.join(" "), approx.re, approx.im)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanConfig {
    pub command: Option<Command>,
    pub alpha: Option<AlphaSpec>,
    pub curve: Option<WeierstrassCurve>,
    pub alpha_point: Option<CurvePoint>,
    pub s: PlaceSet,
    pub n_min: u64,
    pub n_max: Option<u64>,
    pub big_n_max: Option<u64>,
    pub p: Option<u64>,
    pub m: Option<u64>,
    pub k: u64,
    pub arcs: usize,
    pub regions: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub tol: f64,
    pub annulus_d: Option<f64>,
    pub out: Option<PathBuf>,
    /// Keys present in the text, for per-command requirement checks.
    pub present: Vec<String>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            command: None,
            alpha: None,
            curve: None,
            alpha_point: None,
            s: PlaceSet::archimedean_only(),
            n_min: 1,
            n_max: None,
            big_n_max: None,
            p: None,
            m: None,
            k: 4,
            arcs: 100,
            regions: 50,
            seed: 1,
            epsilon: 0.1,
            tol: 1e-6,
            annulus_d: None,
            out: None,
            present: Vec::new(),
        }
    }
}

pub const KEYS: &[&str] = &[
    "command",
    "alpha",
    "alpha_minpoly",
    "alpha_approx",
    "curve",
    "alpha_point",
    "S",
    "n_min",
    "n_max",
    "N_max",
    "p",
    "m",
    "K",
    "arcs",
    "regions",
    "seed",
    "epsilon",
    "tol",
    "D",
    "out",
];

fn positive(key: &str, v: &str) -> Result<u64, String> {
    match v.parse::<i64>() {
        Ok(n) if n > 0 => Ok(n as u64),
        Ok(_) => Err(format!("{key}: range must be positive")),
        Err(_) => Err(format!("{key}: malformed integer '{v}'")),
    }
}

fn unit_interval(key: &str, v: &str) -> Result<f64, String> {
    match v.parse::<f64>() {
        Ok(x) if x > 0.0 && x < 1.0 => Ok(x),
        Ok(_) => Err(format!("{key}: tolerance must lie in (0, 1)")),
        Err(_) => Err(format!("{key}: malformed number '{v}'")),
    }
}

fn complex(key: &str, v: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    let nums: Option<Vec<f64>> = parts.iter().map(|s| s.parse::<f64>().ok()).collect();
    match nums.as_deref() {
        Some([re]) => Ok(Complex64::new(*re, 0.0)),
        Some([re, im]) => Ok(Complex64::new(*re, *im)),
        _ => Err(format!("{key}: expected 're' or 're,im', got '{v}'")),
    }
}

fn places(v: &str) -> Result<PlaceSet, String> {
    let mut primes = Vec::new();
    for t in v.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if t == "inf" || t == "oo" || t == "∞" {
            continue;
        }
        primes.push(t.parse::<u64>().map_err(|_| format!("S: malformed prime '{t}'"))?);
    }
    PlaceSet::from_primes(primes).map_err(|e| format!("S: {e}"))
}

/// Parse `key = value` lines; `#` starts a comment. Every violation is
/// collected before failing.
pub fn parse_config(text: &str) -> Result<ScanConfig, CliError> {
    let mut raw: BTreeMap<String, String> = BTreeMap::new();
    let mut errors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            errors.push(format!("line {}: expected 'key = value'", i + 1));
            continue;
        };
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            errors.push(format!("line {}: unknown key '{k}'", i + 1));
            continue;
        }
        if raw.insert(k.to_string(), v.to_string()).is_some() {
            errors.push(format!("line {}: duplicate key '{k}'", i + 1));
        }
    }
    let mut cfg = ScanConfig { present: raw.keys().cloned().collect(), ..ScanConfig::default() };
    let mut minpoly: Option<Vec<i64>> = None;
    let mut approx: Option<Complex64> = None;
    for (k, v) in &raw {
        let r: Result<(), String> = (|| {
            match k.as_str() {
                "command" => cfg.command = Some(v.parse()?),
                "alpha" => {
                    let q = BigRational::from_str(v).map_err(|_| format!("alpha: malformed rational '{v}'"))?;
                    cfg.alpha = Some(AlphaSpec::Rational(q));
                }
                "alpha_minpoly" => {
                    let c: Result<Vec<i64>, _> = v.split_whitespace().map(str::parse::<i64>).collect();
                    minpoly = Some(c.map_err(|_| format!("alpha_minpoly: malformed coefficients '{v}'"))?);
                }
                "alpha_approx" => approx = Some(complex(k, v)?),
                "curve" => cfg.curve = Some(WeierstrassCurve::parse(v).map_err(|e| format!("curve: {e}"))?),
                "alpha_point" => cfg.alpha_point = Some(CurvePoint::parse(v).map_err(|e| format!("alpha_point: {e}"))?),
                "S" => cfg.s = places(v)?,
                "n_min" => cfg.n_min = positive(k, v)?,
                "n_max" => cfg.n_max = Some(positive(k, v)?),
                "N_max" => cfg.big_n_max = Some(positive(k, v)?),
                "p" => cfg.p = Some(positive(k, v)?),
                "m" => cfg.m = Some(positive(k, v)?),
                "K" => cfg.k = positive(k, v)?,
                "arcs" => cfg.arcs = positive(k, v)? as usize,
                "regions" => cfg.regions = positive(k, v)? as usize,
                "seed" => cfg.seed = v.parse().map_err(|_| format!("seed: malformed integer '{v}'"))?,
                "epsilon" => cfg.epsilon = unit_interval(k, v)?,
                "tol" => cfg.tol = unit_interval(k, v)?,
                "D" => match v.parse::<f64>() {
                    Ok(d) if d > 0.0 && d.is_finite() => cfg.annulus_d = Some(d),
                    _ => return Err(format!("D: must be a positive number, got '{v}'")),
                },
                "out" => cfg.out = Some(PathBuf::from(v)),
                _ => unreachable!(),
            }
            Ok(())
        })();
        if let Err(e) = r {
            errors.push(e);
        }
    }
    match (minpoly, approx) {
        (Some(coeffs), approx) => {
            if cfg.alpha.is_some() {
                errors.push("alpha and alpha_minpoly are mutually exclusive".into());
            } else if coeffs.len() < 2 || coeffs[0] == 0 {
                errors.push("alpha_minpoly: need a nonzero leading coefficient and degree >= 1".into());
            } else {
                cfg.alpha = Some(AlphaSpec::Minpoly { coeffs, approx: approx.unwrap_or_default() });
                cfg.present.push("alpha".into());
            }
        }
        (None, Some(_)) => errors.push("alpha_approx given without alpha_minpoly".into()),
        (None, None) => {}
    }
    if let (Some(hi), true) = (cfg.n_max, raw.contains_key("n_min")) {
        if cfg.n_min > hi {
            errors.push("n_min exceeds n_max".into());
        }
    }
    if errors.is_empty() {
        Ok(cfg)
    } else {
        Err(CliError::Config(errors))
    }
}

impl ScanConfig {
    /// Fails listing every required key missing for `command`.
    pub fn require(&self, command: Command) -> Result<(), CliError> {
        let missing: Vec<String> = command
            .required_keys()
            .iter()
            .filter(|k| !self.present.iter().any(|p| p == *k))
            .map(|k| format!("missing required key '{k}' for {command}"))
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(missing))
        }
    }

    pub fn alpha_rational(&self, command: Command) -> Result<BigRational, CliError> {
        self.alpha
            .as_ref()
            .and_then(|a| a.rational().cloned())
            .ok_or_else(|| CliError::Config(vec![format!("{command} needs a rational alpha")]))
    }
}
