//! Integer factorization: trial division to 10^6, then Brent's variant of
//! Pollard rho with Miller-Rabin primality testing.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use std::sync::OnceLock;

pub const TRIAL_LIMIT: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeFactorization {
    /// (prime, exponent) with primes strictly increasing.
    pub factors: Vec<(BigUint, u32)>,
}

impl PrimeFactorization {
    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.iter().map(|(p, _)| p)
    }

    pub fn reconstruct(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, (p, e)| acc * num_traits::pow(p.clone(), *e as usize))
    }

    /// Factors as machine integers; panics if a prime exceeds `u64`.
    pub fn small(&self) -> Vec<(u64, u32)> {
        self.factors
            .iter()
            .map(|(p, e)| (p.to_u64().expect("prime exceeds u64"), *e))
            .collect()
    }
}

/// Result of a factorization with a work budget: the composite cofactor, if
/// any, could not be split within the budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFactorization {
    pub factors: Vec<(BigUint, u32)>,
    pub cofactor: Option<BigUint>,
}

impl PartialFactorization {
    pub fn is_complete(&self) -> bool {
        self.cofactor.is_none()
    }
}

pub fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_LIMIT as usize))
}

pub fn primes_up_to(n: usize) -> Vec<u32> {
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(k, _)| k as u32)
        .collect()
}

fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod_u64(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod_u64(r, a, m);
        }
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    r
}

const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Deterministic for n < 3.3e24; a strong probable-prime test beyond.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(s) = n.to_u64() {
        return is_prime_u64(s);
    }
    if n.is_even() {
        return false;
    }
    for &p in small_primes().iter().take(200) {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'outer: for &a in MR_BASES.iter() {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for &a in MR_BASES.iter().take(12) {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// One Brent-rho attempt with polynomial x^2 + c; `None` if the budget runs out.
fn brent_rho(n: &BigUint, c: u64, budget: u64) -> Option<BigUint> {
    let one = BigUint::one();
    let cb = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &cb) % n;
    let mut y = BigUint::from(2u32);
    let mut r: u64 = 1;
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    let m: u64 = 128;
    let mut spent: u64 = 0;
    while g == one {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g == one {
            ys = y.clone();
            let lim = m.min(r - k);
            for _ in 0..lim {
                y = f(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                q = (q * diff) % n;
            }
            g = q.gcd(n);
            k += lim;
            spent += lim;
        }
        r *= 2;
        if spent > budget {
            return None;
        }
    }
    if &g == n {
        // backtrack one step at a time
        loop {
            ys = f(&ys);
            let diff = if x > ys { &x - &ys } else { &ys - &x };
            g = diff.gcd(n);
            if g != one {
                break;
            }
        }
    }
    if &g == n {
        None
    } else {
        Some(g)
    }
}

fn split_recursive(
    n: BigUint,
    budget: u64,
    attempts: u64,
    out: &mut Vec<BigUint>,
    stuck: &mut Vec<BigUint>,
) {
    if n.is_one() {
        return;
    }
    if is_probable_prime(&n) {
        out.push(n);
        return;
    }
    // perfect powers defeat rho quickly enough, but check squares cheaply
    let r = n.sqrt();
    if &r * &r == n {
        split_recursive(r.clone(), budget, attempts, out, stuck);
        split_recursive(r, budget, attempts, out, stuck);
        return;
    }
    for c in 1..=attempts {
        if let Some(d) = brent_rho(&n, c, budget) {
            let e = &n / &d;
            split_recursive(d, budget, attempts, out, stuck);
            split_recursive(e, budget, attempts, out, stuck);
            return;
        }
    }
    stuck.push(n);
}

fn collect(mut primes: Vec<BigUint>) -> Vec<(BigUint, u32)> {
    primes.sort();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Factor with a rho iteration budget per attempt. Composite parts that
/// resist factorization are multiplied into the returned cofactor.
pub fn factor_with_budget(n: &BigUint, budget: u64) -> PartialFactorization {
    factor_attempts(n, budget, 3)
}

fn factor_attempts(n: &BigUint, budget: u64, attempts: u64) -> PartialFactorization {
    assert!(!n.is_zero(), "factor of zero");
    let mut m = n.clone();
    let mut primes: Vec<BigUint> = Vec::new();
    for &p in small_primes() {
        let pb = p as u64;
        if let Some(v) = m.to_u64() {
            if pb * pb > v {
                break;
            }
        }
        while (&m % p).is_zero() {
            m /= p;
            primes.push(BigUint::from(p));
        }
    }
    let mut stuck = Vec::new();
    if !m.is_one() {
        if let Some(v) = m.to_u64() {
            if v < TRIAL_LIMIT * TRIAL_LIMIT || is_prime_u64(v) {
                // trial division to sqrt already done for small residues
                primes.push(m.clone());
                m = BigUint::one();
            }
        }
    }
    if !m.is_one() {
        split_recursive(m, budget, attempts, &mut primes, &mut stuck);
    }
    let cofactor = if stuck.is_empty() {
        None
    } else {
        Some(stuck.iter().fold(BigUint::one(), |a, b| a * b))
    };
    PartialFactorization { factors: collect(primes), cofactor }
}

/// Complete factorization of a positive integer.
pub fn factor(n: &BigUint) -> PrimeFactorization {
    if n.is_one() {
        return PrimeFactorization { factors: Vec::new() };
    }
    let mut budget = 1u64 << 20;
    loop {
        let pf = factor_attempts(n, budget, 20);
        if pf.is_complete() {
            return PrimeFactorization { factors: pf.factors };
        }
        budget = budget.saturating_mul(4);
    }
}

pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factor of zero");
    let mut out = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m && p <= TRIAL_LIMIT {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        if p * p > m || is_prime_u64(m) {
            out.push((m, 1));
        } else {
            out = merge_small(out, factor(&BigUint::from(m)).small());
        }
    }
    out
}

fn merge_small(mut a: Vec<(u64, u32)>, b: Vec<(u64, u32)>) -> Vec<(u64, u32)> {
    for (p, e) in b {
        match a.iter_mut().find(|(q, _)| *q == p) {
            Some(x) => x.1 += e,
            None => a.push((p, e)),
        }
    }
    a.sort();
    a
}

/// Largest `e` with `p^e | n`, for nonzero `n`.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let mut m = n.clone();
    let pb = BigInt::from(p);
    let mut e = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return e;
        }
        m = q;
        e += 1;
    }
}

/// Remove every factor of `p` from `n`, returning (exponent, remaining part).
pub fn strip_prime(n: &BigInt, p: u64) -> (u32, BigInt) {
    let mut m = n.clone();
    let pb = BigInt::from(p);
    let mut e = 0;
    while !m.is_zero() {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            break;
        }
        m = q;
        e += 1;
    }
    (e, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        assert_eq!(factor_u64(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factor_u64(1), vec![]);
        assert_eq!(factor_u64(2047), vec![(23, 1), (89, 1)]);
    }

    #[test]
    fn rho_splits_semiprime_beyond_trial_range() {
        // two primes just above 10^6 force the rho path
        let p = 1_000_003u64;
        let q = 1_000_033u64;
        let n = BigUint::from(p) * BigUint::from(q) * BigUint::from(1_000_037u64);
        let f = factor(&n);
        assert_eq!(f.small(), vec![(p, 1), (q, 1), (1_000_037, 1)]);
    }

    #[test]
    fn mersenne_composite() {
        // 2^67 - 1 = 193707721 * 761838257287
        let n = (BigUint::one() << 67) - BigUint::one();
        let f = factor(&n);
        assert_eq!(f.small(), vec![(193707721, 1), (761838257287, 1)]);
        assert_eq!(f.reconstruct(), n);
    }

    #[test]
    fn primality() {
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(561));
        let m127 = (BigUint::one() << 127) - BigUint::one();
        assert!(is_probable_prime(&m127));
        assert!(!is_probable_prime(&(&m127 * BigUint::from(3u32))));
    }
}
