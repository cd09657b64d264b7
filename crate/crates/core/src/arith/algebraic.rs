//! Algebraic numbers given by a minimal polynomial and an isolating disc, and
//! places of the rationals.

use super::cyclotomic::cyclotomic;
use super::functions::phi;
use super::poly::IntPolynomial;
use super::roots::certified_roots;
use super::zfactor::is_irreducible;
use crate::dd::Cdd;
use crate::error::{LabError, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Debug)]
pub struct AlgebraicNumber {
    minpoly: IntPolynomial,
    center: Cdd,
    radius: f64,
}

impl AlgebraicNumber {
    pub fn from_rational(q: &BigRational) -> Self {
        let (a, b) = (q.numer().clone(), q.denom().clone());
        let minpoly = IntPolynomial::new(vec![-a, b]);
        let center = Cdd::real(crate::dd::Dd::from_rational(q));
        AlgebraicNumber { minpoly, center, radius: 0.0 }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_fraction(a: i64, b: i64) -> Self {
        Self::from_rational(&BigRational::new(BigInt::from(a), BigInt::from(b)))
    }

    /// The root of `minpoly` closest to `approx`. The polynomial is made
    /// primitive with positive leading coefficient and must be irreducible.
    pub fn from_minpoly(minpoly: &IntPolynomial, approx: Complex64) -> Result<Self> {
        if minpoly.deg() == 0 {
            return Err(LabError::pre("minimal polynomial must have positive degree"));
        }
        let f = minpoly.primitive_part();
        if !is_irreducible(&f) {
            return Err(LabError::pre(format!("{f} is not irreducible over the rationals")));
        }
        let roots = certified_roots(&f)?;
        let (k, _) = roots
            .iter()
            .enumerate()
            .map(|(i, r)| (i, (r.c64() - approx).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        let sep = roots
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, r)| (r.c64() - roots[k].c64()).norm())
            .fold(f64::INFINITY, f64::min);
        let radius = roots[k].radius;
        if !(2.0 * radius < sep) {
            return Err(LabError::inv("root isolation failed"));
        }
        Ok(AlgebraicNumber { minpoly: f, center: roots[k].z, radius })
    }

    pub fn minpoly(&self) -> &IntPolynomial {
        &self.minpoly
    }

    pub fn center(&self) -> Cdd {
        self.center
    }

    pub fn approx(&self) -> Complex64 {
        self.center.to_c64()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn degree(&self) -> usize {
        self.minpoly.deg()
    }

    pub fn is_zero(&self) -> bool {
        self.degree() == 1 && self.minpoly.coeff(0).is_zero()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        (self.degree() == 1).then(|| BigRational::new(-self.minpoly.coeff(0), self.minpoly.coeff(1)))
    }

    pub fn is_algebraic_integer(&self) -> bool {
        self.minpoly.lead().is_one()
    }

    /// Kronecker: compare against every cyclotomic polynomial of the same degree.
    pub fn is_root_of_unity(&self) -> bool {
        if !self.is_algebraic_integer() {
            return false;
        }
        let d = self.degree() as u64;
        cyclotomic_orders_of_degree(d).into_iter().any(|m| cyclotomic(m) == self.minpoly)
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(q) => write!(f, "{q}"),
            None => {
                let z = self.approx();
                write!(f, "root of {} near {:.6}{:+.6}i", self.minpoly, z.re, z.im)
            }
        }
    }
}

/// All m with phi(m) = d; m <= 2 * 3 * d^2 is a crude but safe bound since
/// phi(m) >= sqrt(m / 2).
pub fn cyclotomic_orders_of_degree(d: u64) -> Vec<u64> {
    let bound = (2 * d * d).max(6) + 1;
    (1..=bound).filter(|&m| phi(m) == d).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Place {
    Archimedean,
    Finite(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Archimedean => write!(f, "inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// A finite set of places, always containing the archimedean one.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PlaceSet {
    finite: BTreeSet<u64>,
}

impl PlaceSet {
    pub fn archimedean_only() -> Self {
        Self::default()
    }

    pub fn from_primes<I: IntoIterator<Item = u64>>(primes: I) -> Result<Self> {
        let mut finite = BTreeSet::new();
        for p in primes {
            if !super::factor::is_prime_u64(p) {
                return Err(LabError::pre(format!("{p} is not prime")));
            }
            finite.insert(p);
        }
        Ok(PlaceSet { finite })
    }

    pub fn insert(&mut self, p: u64) {
        self.finite.insert(p);
    }

    pub fn contains(&self, v: Place) -> bool {
        match v {
            Place::Archimedean => true,
            Place::Finite(p) => self.finite.contains(&p),
        }
    }

    pub fn contains_prime(&self, p: &BigInt) -> bool {
        u64::try_from(p).map(|p| self.finite.contains(&p)).unwrap_or(false)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.finite.iter().copied()
    }

    pub fn places(&self) -> Vec<Place> {
        std::iter::once(Place::Archimedean).chain(self.finite.iter().map(|&p| Place::Finite(p))).collect()
    }

    /// Product of the finite primes.
    pub fn modulus(&self) -> BigInt {
        self.finite.iter().fold(BigInt::one(), |a, &p| a * p)
    }

    /// Remove every prime of S from |n|; returns the S-free cofactor.
    pub fn strip(&self, n: &BigInt) -> BigInt {
        let mut m = n.abs();
        for &p in &self.finite {
            let pb = BigInt::from(p);
            while !m.is_zero() && m.is_multiple_of(&pb) {
                m /= &pb;
            }
        }
        m
    }
}

impl fmt::Display for PlaceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{inf")?;
        for p in &self.finite {
            write!(f, ",{p}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_numbers() {
        let a = AlgebraicNumber::from_fraction(-2, 4);
        assert_eq!(a.minpoly(), &IntPolynomial::from_i64(&[1, 2]));
        assert_eq!(a.as_rational().unwrap(), BigRational::new((-1).into(), 2.into()));
        assert!(!a.is_algebraic_integer());
    }

    #[test]
    fn roots_of_unity_detected() {
        let z = AlgebraicNumber::from_minpoly(&cyclotomic(3), Complex64::new(-0.5, 0.8)).unwrap();
        assert!(z.is_root_of_unity());
        let a = AlgebraicNumber::from_minpoly(&IntPolynomial::from_i64(&[5, -6, 5]), Complex64::new(0.6, 0.8)).unwrap();
        assert!(!a.is_root_of_unity());
        assert!((a.approx() - Complex64::new(0.6, 0.8)).norm() < 1e-15);
        assert!(AlgebraicNumber::from_integer(-1).is_root_of_unity());
    }

    #[test]
    fn reducible_minpoly_rejected() {
        assert!(AlgebraicNumber::from_minpoly(&IntPolynomial::from_i64(&[-1, 0, 1]), Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn orders_of_degree_four() {
        assert_eq!(cyclotomic_orders_of_degree(4), vec![5, 8, 10, 12]);
    }

    #[test]
    fn place_sets() {
        let s = PlaceSet::from_primes([7, 2, 3]).unwrap();
        assert!(s.contains(Place::Archimedean));
        assert!(s.contains(Place::Finite(3)));
        assert!(!s.contains(Place::Finite(5)));
        assert_eq!(s.strip(&BigInt::from(-2 * 2 * 3 * 5 * 7)), BigInt::from(5));
        assert_eq!(s.to_string(), "{inf,2,3,7}");
        assert!(PlaceSet::from_primes([4]).is_err());
    }
}
