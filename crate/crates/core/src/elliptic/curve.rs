//! Weierstrass curves over the rationals with integral coefficients.

use crate::arith::factor::{factor, valuation};
use crate::arith::modp::is_square_mod;
use crate::error::{LabError, Result};
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::fmt;

/// y² + a1xy + a3y = x³ + a2x² + a4x + a6.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeierstrassCurve {
    #[serde(serialize_with = "crate::ser::display")]
    pub a1: BigInt,
    #[serde(serialize_with = "crate::ser::display")]
    pub a2: BigInt,
    #[serde(serialize_with = "crate::ser::display")]
    pub a3: BigInt,
    #[serde(serialize_with = "crate::ser::display")]
    pub a4: BigInt,
    #[serde(serialize_with = "crate::ser::display")]
    pub a6: BigInt,
    #[serde(serialize_with = "crate::ser::display")]
    pub b2: BigInt,
    #[serde(serialize_with = "crate::ser::display")]
    pub b4: BigInt,
    #[serde(serialize_with = "crate::ser::display")]
    pub b6: BigInt,
    #[serde(serialize_with = "crate::ser::display")]
    pub b8: BigInt,
    #[serde(serialize_with = "crate::ser::display")]
    pub c4: BigInt,
    #[serde(serialize_with = "crate::ser::display")]
    pub c6: BigInt,
    #[serde(serialize_with = "crate::ser::display")]
    pub disc: BigInt,
    #[serde(serialize_with = "crate::ser::display")]
    pub j: BigRational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ReductionType {
    Good,
    SplitMultiplicative,
    NonsplitMultiplicative,
    Additive,
}

impl ReductionType {
    pub fn is_multiplicative(self) -> bool {
        matches!(self, ReductionType::SplitMultiplicative | ReductionType::NonsplitMultiplicative)
    }
}

impl fmt::Display for ReductionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ReductionType::Good => "good",
            ReductionType::SplitMultiplicative => "split multiplicative",
            ReductionType::NonsplitMultiplicative => "nonsplit multiplicative",
            ReductionType::Additive => "additive",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BadPrime {
    pub p: u64,
    pub reduction: ReductionType,
    pub ord_disc: u32,
}

impl WeierstrassCurve {
    pub fn new(a1: BigInt, a2: BigInt, a3: BigInt, a4: BigInt, a6: BigInt) -> Result<Self> {
        let b2 = &a1 * &a1 + 4 * &a2;
        let b4 = 2 * &a4 + &a1 * &a3;
        let b6 = &a3 * &a3 + 4 * &a6;
        let b8 = &a1 * &a1 * &a6 + 4 * &a2 * &a6 - &a1 * &a3 * &a4 + &a2 * &a3 * &a3 - &a4 * &a4;
        let c4 = &b2 * &b2 - 24 * &b4;
        let b2cube: BigInt = &b2 * &b2 * &b2;
        let c6: BigInt = 36 * &b2 * &b4 - 216 * &b6 - b2cube;
        let b2b2b8: BigInt = &b2 * &b2 * &b8;
        let disc: BigInt = -b2b2b8 - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6;
        if disc.is_zero() {
            return Err(LabError::SingularCurve);
        }
        let j = BigRational::new(&c4 * &c4 * &c4, disc.clone());
        Ok(WeierstrassCurve { a1, a2, a3, a4, a6, b2, b4, b6, b8, c4, c6, disc, j })
    }

    pub fn from_i64(a: [i64; 5]) -> Result<Self> {
        let [a1, a2, a3, a4, a6] = a.map(BigInt::from);
        Self::new(a1, a2, a3, a4, a6)
    }

    /// Five whitespace-separated integers `a1 a2 a3 a4 a6`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split_whitespace().collect();
        if parts.len() != 5 {
            return Err(LabError::pre(format!("curve needs 5 coefficients, got {}", parts.len())));
        }
        let mut a = Vec::with_capacity(5);
        for s in parts {
            a.push(s.parse::<BigInt>().map_err(|_| LabError::pre(format!("bad curve coefficient '{s}'")))?);
        }
        let mut it = a.into_iter();
        let mut next = || it.next().unwrap();
        Self::new(next(), next(), next(), next(), next())
    }

    pub fn coefficients(&self) -> [&BigInt; 5] {
        [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6]
    }

    pub fn descriptor(&self) -> String {
        self.coefficients().map(|c| c.to_string()).join(" ")
    }

    /// ψ₂² = 4x³ + b2x² + 2b4x + b6 as integer coefficients, constant term first.
    pub fn two_torsion_cubic(&self) -> [BigInt; 4] {
        [self.b6.clone(), 2 * &self.b4, self.b2.clone(), BigInt::from(4)]
    }

    /// Primes dividing the discriminant with their reduction types.
    pub fn bad_primes(&self) -> Vec<BadPrime> {
        let n = self.disc.magnitude().clone();
        factor(&n)
            .primes()
            .map(|p| {
                let p = p.to_u64().expect("discriminant prime exceeds u64");
                BadPrime { p, reduction: self.reduction_at(p), ord_disc: valuation(&self.disc, p) }
            })
            .collect()
    }

    pub fn reduction_at(&self, p: u64) -> ReductionType {
        let pb = BigInt::from(p);
        if !self.disc.is_multiple_of(&pb) {
            return ReductionType::Good;
        }
        if self.c4.is_multiple_of(&pb) {
            return ReductionType::Additive;
        }
        let split = if p >= 5 {
            let m = (-&self.c6).mod_floor(&pb).to_u64().unwrap();
            is_square_mod(m, p)
        } else {
            self.node_is_split(p)
        };
        if split {
            ReductionType::SplitMultiplicative
        } else {
            ReductionType::NonsplitMultiplicative
        }
    }

    /// Whether the tangent lines at the node of the reduction mod a small
    /// prime are defined over F_p.
    pub fn node_is_split(&self, p: u64) -> bool {
        let r = |c: &BigInt| c.mod_floor(&BigInt::from(p)).to_u64().unwrap();
        let [a1, a2, a3, a4, a6] = self.coefficients().map(r);
        let m = |x: u64| x % p;
        for x in 0..p {
            for y in 0..p {
                let lhs = m(y * y + a1 * x * y + a3 * y);
                let rhs = m(x * x * x + a2 * x * x + a4 * x + a6);
                let fy = m(2 * y + a1 * x + a3);
                let fx = m(3 * x * x + 2 * a2 * x + a4 + (p - m(a1 * y)));
                if lhs == rhs && fy == 0 && fx == 0 {
                    let c = m(3 * x + a2);
                    return (0..p).any(|t| m(t * t + a1 * t + (p - c)) == 0);
                }
            }
        }
        unreachable!("no singular point mod {p} although p divides the discriminant")
    }

    /// Primes at which an admissible change of variables could shrink the
    /// discriminant: p⁴ | c4, p⁶ | c6 and p¹² | Δ.
    pub fn minimality_obstructions(&self) -> Vec<u64> {
        self.bad_primes()
            .into_iter()
            .filter(|b| {
                let ok4 = self.c4.is_zero() || valuation(&self.c4, b.p) >= 4;
                let ok6 = self.c6.is_zero() || valuation(&self.c6, b.p) >= 6;
                ok4 && ok6 && b.ord_disc >= 12
            })
            .map(|b| b.p)
            .collect()
    }

    pub fn is_minimal(&self) -> bool {
        self.minimality_obstructions().is_empty()
    }

    pub fn disc_sign(&self) -> Sign {
        self.disc.sign()
    }

    pub fn is_semistable(&self) -> bool {
        self.bad_primes().iter().all(|b| b.reduction.is_multiplicative())
    }

    pub fn j_is_integral(&self) -> bool {
        self.j.denom().abs() == BigInt::from(1)
    }
}

impl fmt::Display for WeierstrassCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{},{},{}]", self.a1, self.a2, self.a3, self.a4, self.a6)
    }
}
