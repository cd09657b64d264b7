//! Polynomials over a prime field `F_p`, coefficients lowest degree first,
//! with gcd and Cantor-Zassenhaus factorization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMod {
    pub p: u64,
    pub c: Vec<u64>,
}

#[inline]
fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

// a, b < p; safe for p near 2^64
fn addm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

fn subm(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + (p - b)
    }
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    powm(a, p - 2, p)
}

pub fn powm(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, a, p);
        }
        a = mulm(a, a, p);
        e >>= 1;
    }
    r
}

/// Legendre symbol style test: is `a` a square modulo the odd prime `p`.
pub fn is_square_mod(a: u64, p: u64) -> bool {
    let a = a % p;
    if a == 0 || p == 2 {
        return true;
    }
    powm(a, (p - 1) / 2, p) == 1
}

impl PolyMod {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        PolyMod { p, c }
    }

    pub fn from_i64(p: u64, v: &[i64]) -> Self {
        let c = v.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect();
        Self::new(p, c)
    }

    pub fn zero(p: u64) -> Self {
        PolyMod { p, c: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        PolyMod { p, c: vec![1 % p] }
    }

    pub fn x(p: u64) -> Self {
        Self::new(p, vec![0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lead(&self) -> u64 {
        *self.c.last().unwrap_or(&0)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(self.lead(), self.p);
        Self::new(self.p, self.c.iter().map(|&x| mulm(x, inv, self.p)).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let mut v = vec![0u64; n];
        for (i, x) in v.iter_mut().enumerate() {
            let a = *self.c.get(i).unwrap_or(&0);
            let b = *o.c.get(i).unwrap_or(&0);
            *x = addm(a, b, self.p);
        }
        Self::new(self.p, v)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let mut v = vec![0u64; n];
        for (i, x) in v.iter_mut().enumerate() {
            let a = *self.c.get(i).unwrap_or(&0);
            let b = *o.c.get(i).unwrap_or(&0);
            *x = subm(a, b, self.p);
        }
        Self::new(self.p, v)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.p);
        }
        let p = self.p as u128;
        let mut acc = vec![0u128; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                acc[i + j] = (acc[i + j] + a as u128 * b as u128) % p;
            }
        }
        Self::new(self.p, acc.into_iter().map(|x| x as u64).collect())
    }

    pub fn scale(&self, k: u64) -> Self {
        Self::new(self.p, self.c.iter().map(|&x| mulm(x, k, self.p)).collect())
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial mod p");
        let p = self.p;
        if self.c.len() < d.c.len() {
            return (Self::zero(p), self.clone());
        }
        let inv = inv_mod(d.lead(), p);
        let dd = d.deg();
        let mut r = self.c.clone();
        let mut q = vec![0u64; self.c.len() - dd];
        for k in (0..q.len()).rev() {
            let t = mulm(r[k + dd], inv, p);
            q[k] = t;
            if t == 0 {
                continue;
            }
            for (i, &dc) in d.c.iter().enumerate() {
                r[k + i] = subm(r[k + i], mulm(t, dc, p), p);
            }
        }
        (Self::new(p, q), Self::new(p, r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: returns (g, s, t) with s*self + t*o = g, g monic.
    pub fn xgcd(&self, o: &Self) -> (Self, Self, Self) {
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Self::one(p), Self::zero(p));
        let (mut t0, mut t1) = (Self::zero(p), Self::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = r1;
            r1 = r;
            let s2 = s0.sub(&q.mul(&s1));
            s0 = s1;
            s1 = s2;
            let t2 = t0.sub(&q.mul(&t1));
            t0 = t1;
            t1 = t2;
        }
        let inv = inv_mod(r0.lead(), p);
        (r0.scale(inv), s0.scale(inv), t0.scale(inv))
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        Self::new(
            p,
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &x)| mulm(x, i as u64 % p, p))
                .collect(),
        )
    }

    pub fn eval(&self, x: u64) -> u64 {
        let mut acc = 0u64;
        for &c in self.c.iter().rev() {
            acc = (mulm(acc, x, self.p) + c) % self.p;
        }
        acc
    }

    /// `self^e mod m`
    pub fn powmod(&self, mut e: u128, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut r = Self::one(self.p).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        r
    }

    pub fn is_squarefree(&self) -> bool {
        if self.deg() == 0 {
            return true;
        }
        let g = self.gcd(&self.derivative());
        g.deg() == 0
    }
}

/// Distinct-degree factorization of a monic squarefree polynomial.
fn distinct_degree(f: &PolyMod) -> Vec<(PolyMod, usize)> {
    let p = f.p;
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = PolyMod::x(p);
    let mut h = x.rem(&rest);
    let mut d = 0usize;
    while rest.deg() >= 2 * (d + 1) {
        d += 1;
        h = h.powmod(p as u128, &rest);
        let g = rest.gcd(&h.sub(&x));
        if g.deg() > 0 {
            out.push((g.clone(), d));
            rest = rest.div_rem(&g).0.monic();
            h = h.rem(&rest);
        }
    }
    if rest.deg() > 0 {
        let dd = rest.deg();
        out.push((rest, dd));
    }
    out
}

/// Equal-degree splitting (Cantor-Zassenhaus) with a seeded generator.
fn equal_degree(f: &PolyMod, d: usize, rng: &mut ChaCha8Rng) -> Vec<PolyMod> {
    let p = f.p;
    let n = f.deg();
    if n == d {
        return vec![f.monic()];
    }
    loop {
        let a = PolyMod::new(p, (0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.deg() == 0 {
            continue;
        }
        let g = if p == 2 {
            // trace map a + a^2 + ... + a^(2^(d-1))
            let mut t = a.rem(f);
            let mut acc = t.clone();
            for _ in 1..d {
                t = t.mul(&t).rem(f);
                acc = acc.add(&t);
            }
            f.gcd(&acc)
        } else {
            // a^((p^d - 1)/2) = (a^(1 + p + ... + p^(d-1)))^((p-1)/2)
            let mut t = a.rem(f);
            let mut acc = t.clone();
            for _ in 1..d {
                t = t.powmod(p as u128, f);
                acc = acc.mul(&t).rem(f);
            }
            let b = acc.powmod(((p - 1) / 2) as u128, f).sub(&PolyMod::one(p));
            f.gcd(&b)
        };
        if g.deg() > 0 && g.deg() < n {
            let h = f.div_rem(&g).0.monic();
            let mut v = equal_degree(&g, d, rng);
            v.extend(equal_degree(&h, d, rng));
            return v;
        }
    }
}

/// Factor a squarefree polynomial mod p into monic irreducibles, sorted by
/// (degree, coefficients).
pub fn factor_squarefree(f: &PolyMod, seed: u64) -> Vec<PolyMod> {
    let f = f.monic();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ f.p);
    let mut out = Vec::new();
    for (g, d) in distinct_degree(&f) {
        out.extend(equal_degree(&g, d, &mut rng));
    }
    out.sort_by(|a, b| (a.deg(), &a.c).cmp(&(b.deg(), &b.c)));
    out
}

/// Degrees of the irreducible factors of a squarefree polynomial mod p,
/// from the distinct-degree split alone.
pub fn factor_degrees(f: &PolyMod) -> Vec<usize> {
    let mut out = Vec::new();
    for (g, d) in distinct_degree(&f.monic()) {
        for _ in 0..(g.deg() / d) {
            out.push(d);
        }
    }
    out.sort_unstable();
    out
}

/// Roots in F_p of a nonzero polynomial, sorted.
pub fn roots(f: &PolyMod, seed: u64) -> Vec<u64> {
    if f.deg() == 0 {
        return Vec::new();
    }
    let p = f.p;
    let x = PolyMod::x(p);
    let fm = f.monic();
    let xp = x.powmod(p as u128, &fm);
    let g = fm.gcd(&xp.sub(&x));
    if g.deg() == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p);
    let mut out: Vec<u64> = equal_degree(&g, 1, &mut rng)
        .into_iter()
        .map(|l| (p - l.c[0]) % p)
        .collect();
    out.sort_unstable();
    out
}

/// Degree of gcd(f mod p, g mod p) for a prime p of any size.
pub fn gcd_degree_mod(f: &super::poly::IntPolynomial, g: &super::poly::IntPolynomial, p: &num_bigint::BigInt) -> usize {
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::{ToPrimitive, Zero};
    if let Some(q) = p.to_u64() {
        let a = PolyMod::new(q, f.reduce_mod(q));
        let b = PolyMod::new(q, g.reduce_mod(q));
        return a.gcd(&b).deg();
    }
    fn norm(v: Vec<BigInt>, p: &BigInt) -> Vec<BigInt> {
        let mut v: Vec<BigInt> = v.into_iter().map(|c| c.mod_floor(p)).collect();
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        v
    }
    let mut a = norm(f.coeffs().to_vec(), p);
    let mut b = norm(g.coeffs().to_vec(), p);
    let two = BigInt::from(2);
    while !b.is_empty() {
        let inv = b.last().unwrap().modpow(&(p - &two), p);
        while a.len() >= b.len() {
            let t = (a.last().unwrap() * &inv).mod_floor(p);
            let shift = a.len() - b.len();
            for (i, c) in b.iter().enumerate() {
                a[shift + i] = (&a[shift + i] - &t * c).mod_floor(p);
            }
            a = norm(a, p);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_near_u64_max() {
        let p = 18_446_744_073_709_551_557; // largest prime below 2^64
        let f = PolyMod::new(p, vec![p - 1, 0, 1]); // x^2 - 1
        let g = PolyMod::new(p, vec![p - 1, 1]); // x - 1
        assert_eq!(f.gcd(&g), g);
        assert!(f.rem(&g).is_zero());
        assert_eq!(g.sub(&f).add(&f), g);
    }

    #[test]
    fn gcd_of_cyclotomic_and_linear() {
        // x - 2 and Phi_5 share a root mod 31
        let f = PolyMod::from_i64(31, &[-2, 1]);
        let g = PolyMod::from_i64(31, &[1, 1, 1, 1, 1]);
        assert_eq!(f.gcd(&g).deg(), 1);
        let g7 = PolyMod::from_i64(7, &[1, 1, 1, 1, 1]);
        assert_eq!(PolyMod::from_i64(7, &[-2, 1]).gcd(&g7).deg(), 0);
    }

    #[test]
    fn factorization_recomposes() {
        // x^8 - 1 mod 17 splits into linear factors
        let f = PolyMod::from_i64(17, &[-1, 0, 0, 0, 0, 0, 0, 0, 1]);
        let fs = factor_squarefree(&f, 1);
        assert_eq!(fs.len(), 8);
        let prod = fs.iter().fold(PolyMod::one(17), |a, b| a.mul(b));
        assert_eq!(prod, f);
        // Phi_5 mod 2 is irreducible of degree 4
        let g = PolyMod::from_i64(2, &[1, 1, 1, 1, 1]);
        assert_eq!(factor_degrees(&g), vec![4]);
        // Phi_7 mod 2 = two cubics
        let h = PolyMod::from_i64(2, &[1, 1, 1, 1, 1, 1, 1]);
        assert_eq!(factor_squarefree(&h, 3).iter().map(|q| q.deg()).collect::<Vec<_>>(), vec![3, 3]);
    }

    #[test]
    fn xgcd_identity() {
        let f = PolyMod::from_i64(101, &[3, 0, 1, 7]);
        let g = PolyMod::from_i64(101, &[5, 1, 1]);
        let (d, s, t) = f.xgcd(&g);
        assert_eq!(d, PolyMod::one(101));
        assert_eq!(s.mul(&f).add(&t.mul(&g)), d);
    }

    #[test]
    fn root_finding() {
        let f = PolyMod::from_i64(13, &[-6, 11, -6, 1]);
        assert_eq!(roots(&f, 0), vec![1, 2, 3]);
    }
}
