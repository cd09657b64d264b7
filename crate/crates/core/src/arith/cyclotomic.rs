//! Cyclotomic polynomials via the Moebius product over divisors.

use super::functions::{divisors, moebius};
use super::poly::IntPolynomial;
use num_bigint::BigInt;
use num_traits::Zero;

/// `Phi_n(x) = prod_{d | n} (x^d - 1)^{mu(n/d)}`.
///
/// Numerator factors are multiplied in first, then the denominators are
/// divided out; both steps are sparse shifts, so the cost is
/// O(n * number of divisors).
pub fn cyclotomic(n: u64) -> IntPolynomial {
    assert!(n >= 1, "cyclotomic index must be positive");
    let divs = divisors(n);
    let mut num: Vec<u64> = Vec::new();
    let mut den: Vec<u64> = Vec::new();
    for &d in &divs {
        match moebius(n / d) {
            1 => num.push(d),
            -1 => den.push(d),
            _ => {}
        }
    }
    let top: usize = num.iter().sum::<u64>() as usize;
    let mut c = vec![BigInt::zero(); top + 1];
    c[0] = BigInt::from(1);
    let mut deg = 0usize;
    for &d in &num {
        // multiply by (x^d - 1)
        let d = d as usize;
        for i in (0..=deg + d).rev() {
            let shifted = if i >= d { c[i - d].clone() } else { BigInt::zero() };
            c[i] = shifted - &c[i];
        }
        deg += d;
    }
    for &d in &den {
        // divide by (x^d - 1): q_i = q_{i-d} - c_i, processed from the bottom
        let d = d as usize;
        let qdeg = deg - d;
        let mut q = vec![BigInt::zero(); qdeg + 1];
        for i in 0..=qdeg {
            let prev = if i >= d { q[i - d].clone() } else { BigInt::zero() };
            q[i] = prev - &c[i];
        }
        c = q;
        deg = qdeg;
    }
    c.truncate(deg + 1);
    IntPolynomial::new(c)
}

/// Homogenized cyclotomic value `b^phi(n) Phi_n(a/b)`.
pub fn cyclotomic_homogeneous(n: u64, a: &BigInt, b: &BigInt) -> BigInt {
    cyclotomic(n).eval_homogeneous(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(cyclotomic(1), IntPolynomial::from_i64(&[-1, 1]));
        assert_eq!(cyclotomic(2), IntPolynomial::from_i64(&[1, 1]));
        assert_eq!(cyclotomic(6), IntPolynomial::from_i64(&[1, -1, 1]));
        assert_eq!(cyclotomic(12), IntPolynomial::from_i64(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn phi_105_has_a_coefficient_minus_two() {
        let f = cyclotomic(105);
        assert_eq!(f.deg(), 48);
        assert!(f.coeffs().iter().any(|c| *c == BigInt::from(-2)));
    }

    #[test]
    fn homogeneous_value() {
        assert_eq!(cyclotomic_homogeneous(3, &BigInt::from(1), &BigInt::from(2)), BigInt::from(7));
        assert_eq!(cyclotomic_homogeneous(5, &BigInt::from(2), &BigInt::from(1)), BigInt::from(31));
    }
}
