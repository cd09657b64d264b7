//! Division polynomials in the x-coordinate and their primitive parts.
//!
//! g_N is ψ_N for odd N and ψ_N/ψ₂ for even N; with F = ψ₂² the standard
//! recurrences become polynomial identities in x alone.

use super::curve::WeierstrassCurve;
use crate::arith::functions::{distinct_primes, divisors};
use crate::arith::poly::IntPolynomial;
use crate::error::{LabError, Result};
use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;

pub const MAX_DIVISION_ORDER: u64 = 30;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisionPolynomialSet {
    pub n: u64,
    /// ψ_N for odd N, F·ψ_N/ψ₂ for even N: roots are x(P) for P ∈ E[N] \ {O}.
    pub psi_x: IntPolynomial,
    /// Primitive part whose roots are x-coordinates of points of exact order N.
    pub f_n: IntPolynomial,
}

/// (1/2)N²∏_{p|N}(1 − 1/p²) for N ≥ 3; 3 for N = 2 and 0 for N = 1.
pub fn primitive_degree(n: u64) -> usize {
    match n {
        1 => 0,
        2 => 3,
        _ => {
            let mut num = n * n;
            for p in distinct_primes(n) {
                num = num / (p * p) * (p * p - 1);
            }
            (num / 2) as usize
        }
    }
}

/// Builder that memoizes g_k and f_d.
pub struct DivisionTower {
    f: IntPolynomial,
    g: Vec<IntPolynomial>,
    prim: Vec<Option<IntPolynomial>>,
}

impl DivisionTower {
    pub fn new(e: &WeierstrassCurve) -> Self {
        let c = |v: &[BigInt]| IntPolynomial::new(v.to_vec());
        let f = c(&e.two_torsion_cubic());
        let (b2, b4, b6, b8) = (&e.b2, &e.b4, &e.b6, &e.b8);
        let g3 = c(&[b8.clone(), 3 * b6, 3 * b4, b2.clone(), BigInt::from(3)]);
        let g4 = c(&[
            b4 * b8 - b6 * b6,
            b2 * b8 - b4 * b6,
            10 * b8,
            10 * b6,
            5 * b4,
            b2.clone(),
            BigInt::from(2),
        ]);
        let g = vec![IntPolynomial::zero(), IntPolynomial::one(), IntPolynomial::one(), g3, g4];
        DivisionTower { f, g, prim: vec![None, Some(IntPolynomial::one())] }
    }

    fn extend_to(&mut self, n: usize) {
        while self.g.len() <= n {
            let k = self.g.len();
            let m = k / 2;
            let g = &self.g;
            let next = if k % 2 == 1 {
                let f2 = &self.f * &self.f;
                let a = &g[m + 2] * &g[m].pow(3);
                let b = &g[m - 1] * &g[m + 1].pow(3);
                if m % 2 == 0 {
                    &(&f2 * &a) - &b
                } else {
                    &a - &(&f2 * &b)
                }
            } else {
                let a = &g[m + 2] * &(&g[m - 1] * &g[m - 1]);
                let b = &g[m - 2] * &(&g[m + 1] * &g[m + 1]);
                &g[m] * &(&a - &b)
            };
            self.g.push(next);
        }
    }

    /// g_N, with ψ_N = g_N for odd N and ψ_N = ψ₂·g_N for even N.
    pub fn g(&mut self, n: usize) -> &IntPolynomial {
        self.extend_to(n + 2);
        &self.g[n]
    }

    pub fn psi_x(&mut self, n: u64) -> IntPolynomial {
        let n = n as usize;
        let g = self.g(n).clone();
        if n % 2 == 0 {
            &self.f * &g
        } else {
            g
        }
    }

    pub fn primitive(&mut self, n: u64) -> Result<IntPolynomial> {
        if let Some(Some(p)) = self.prim.get(n as usize) {
            return Ok(p.clone());
        }
        let mut quotient = self.psi_x(n);
        for d in divisors(n) {
            if d == n || d == 1 {
                continue;
            }
            let fd = self.primitive(d)?;
            quotient = quotient
                .div_exact(&fd)
                .ok_or_else(|| LabError::inv(format!("f_{d} does not divide psi_{n}")))?;
        }
        let mut fnn = quotient.primitive_part();
        if fnn.lead().is_negative() {
            fnn = -fnn;
        }
        if fnn.deg() != primitive_degree(n) {
            return Err(LabError::inv(format!(
                "deg f_{n} = {} but expected {}",
                fnn.deg(),
                primitive_degree(n)
            )));
        }
        if self.prim.len() <= n as usize {
            self.prim.resize(n as usize + 1, None);
        }
        self.prim[n as usize] = Some(fnn.clone());
        Ok(fnn)
    }

    pub fn set(&mut self, n: u64) -> Result<DivisionPolynomialSet> {
        if !(1..=MAX_DIVISION_ORDER).contains(&n) {
            return Err(LabError::pre(format!("division order must lie in [1, {MAX_DIVISION_ORDER}], got {n}")));
        }
        let f_n = self.primitive(n)?;
        Ok(DivisionPolynomialSet { n, psi_x: self.psi_x(n), f_n })
    }
}

pub fn division_polynomials(e: &WeierstrassCurve, n: u64) -> Result<DivisionPolynomialSet> {
    DivisionTower::new(e).set(n)
}

/// f_1..f_{n_max} sharing one recurrence.
pub fn primitive_division_polynomials(e: &WeierstrassCurve, n_max: u64) -> Result<Vec<DivisionPolynomialSet>> {
    let mut tower = DivisionTower::new(e);
    (1..=n_max).map(|n| tower.set(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_orders_on_37a() {
        let e = WeierstrassCurve::from_i64([0, 0, 1, -1, 0]).unwrap();
        let d2 = division_polynomials(&e, 2).unwrap();
        assert_eq!(d2.psi_x, IntPolynomial::from_i64(&[1, -4, 0, 4]));
        let d3 = division_polynomials(&e, 3).unwrap();
        assert_eq!(d3.f_n, IntPolynomial::from_i64(&[-1, 3, -6, 0, 3]));
        assert_eq!(division_polynomials(&e, 5).unwrap().f_n.deg(), 12);
        assert!(division_polynomials(&e, 31).is_err());
    }

    #[test]
    fn degrees_up_to_twelve() {
        let e = WeierstrassCurve::from_i64([0, -1, 1, 0, 0]).unwrap();
        let sets = primitive_division_polynomials(&e, 12).unwrap();
        for s in &sets[2..] {
            assert_eq!(s.f_n.deg(), primitive_degree(s.n));
        }
        assert_eq!(primitive_degree(12), 48);
    }

    #[test]
    fn known_torsion_abscissae_are_roots() {
        let e = WeierstrassCurve::from_i64([0, 0, 0, 0, 1]).unwrap();
        let mut t = DivisionTower::new(&e);
        let at = |f: &IntPolynomial, x: i64| f.eval(&BigInt::from(x));
        assert_eq!(at(&t.primitive(2).unwrap(), -1), BigInt::from(0));
        assert_eq!(at(&t.primitive(3).unwrap(), 0), BigInt::from(0));
        assert_eq!(at(&t.primitive(6).unwrap(), 2), BigInt::from(0));
        assert_ne!(at(&t.primitive(6).unwrap(), 0), BigInt::from(0));
        let e11 = WeierstrassCurve::from_i64([0, -1, 1, 0, 0]).unwrap();
        let f5 = division_polynomials(&e11, 5).unwrap().f_n;
        assert_eq!(at(&f5, 0), BigInt::from(0));
        assert_eq!(at(&f5, 1), BigInt::from(0));
    }
}
