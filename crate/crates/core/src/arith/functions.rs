//! Euler phi, divisor count, number of distinct prime factors and Moebius.

use super::factor::factor_u64;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ArithValues {
    pub phi: u64,
    pub d: u64,
    pub omega: u32,
    pub mu: i8,
}

pub fn arith_functions(n: u64) -> ArithValues {
    assert!(n >= 1, "arithmetic functions need n >= 1");
    let f = factor_u64(n);
    let mut phi = 1u64;
    let mut d = 1u64;
    let mut squarefree = true;
    for &(p, e) in &f {
        phi *= (p - 1) * p.pow(e - 1);
        d *= (e + 1) as u64;
        if e > 1 {
            squarefree = false;
        }
    }
    let omega = f.len() as u32;
    let mu = if !squarefree {
        0
    } else if omega % 2 == 0 {
        1
    } else {
        -1
    };
    ArithValues { phi, d, omega, mu }
}

pub fn phi(n: u64) -> u64 {
    arith_functions(n).phi
}

pub fn moebius(n: u64) -> i8 {
    arith_functions(n).mu
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factor_u64(n) {
        let len = out.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn distinct_primes(n: u64) -> Vec<u64> {
    factor_u64(n).into_iter().map(|(p, _)| p).collect()
}

/// Multiplicative order of `a` modulo `m`, or `None` when gcd(a, m) != 1.
pub fn multiplicative_order(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(1);
    }
    if num_integer::gcd(a % m, m) != 1 {
        return None;
    }
    let lambda = phi(m);
    let mut ord = lambda;
    for (p, _) in factor_u64(lambda) {
        while ord % p == 0 && powmod(a, ord / p, m) == 1 {
            ord /= p;
        }
    }
    Some(ord)
}

pub fn powmod(a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u128 % m as u128;
    let mut b = (a % m) as u128;
    let mm = m as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % mm;
        }
        b = b * b % mm;
        e >>= 1;
    }
    r as u64
}
