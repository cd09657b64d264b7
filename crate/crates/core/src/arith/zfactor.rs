//! Factorization in `Z[x]`: squarefree decomposition, modular factorization,
//! quadratic Hensel lifting along a factor tree, and subset recombination.

use super::factor::primes_up_to;
use super::modp::{factor_degrees, factor_squarefree, PolyMod};
use super::poly::IntPolynomial;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeSet;

/// `f = content * prod g_i^{e_i}` with primitive `g_i` of positive leading
/// coefficient, sorted by (degree, coefficients).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZFactorization {
    pub content: BigInt,
    pub factors: Vec<(IntPolynomial, u32)>,
}

impl ZFactorization {
    pub fn degrees(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .factors
            .iter()
            .flat_map(|(g, e)| std::iter::repeat(g.deg()).take(*e as usize))
            .collect();
        v.sort_unstable();
        v
    }
}

/// Greatest common divisor in `Z[x]` by the primitive remainder sequence,
/// normalized to positive leading coefficient.
pub fn poly_gcd(a: &IntPolynomial, b: &IntPolynomial) -> IntPolynomial {
    if a.is_zero() {
        return b.primitive_part().scale(&b.content());
    }
    if b.is_zero() {
        return a.primitive_part().scale(&a.content());
    }
    let c = a.content().gcd(&b.content());
    let (mut x, mut y) = (a.primitive_part(), b.primitive_part());
    if x.deg() < y.deg() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_zero() {
        let r = x.pseudo_rem(&y);
        x = y;
        y = if r.is_zero() { r } else { r.primitive_part() };
    }
    x.primitive_part().scale(&c)
}

/// Musser's gcd-based squarefree decomposition of a primitive polynomial:
/// returns (g_i, i) with `f = prod g_i^i` up to sign, each `g_i` squarefree
/// and primitive.
pub fn squarefree_decomposition(f: &IntPolynomial) -> Vec<(IntPolynomial, u32)> {
    let f = f.primitive_part();
    if f.deg() == 0 {
        return Vec::new();
    }
    if quick_squarefree(&f) {
        return vec![(f, 1)];
    }
    let mut out = Vec::new();
    let mut a = poly_gcd(&f, &f.derivative()).primitive_part();
    let mut b = f.div_exact_q(&a);
    let mut i = 1u32;
    while b.deg() > 0 {
        let c = poly_gcd(&a, &b).primitive_part();
        let g = b.div_exact_q(&c);
        if g.deg() > 0 {
            out.push((g, i));
        }
        a = a.div_exact_q(&c);
        b = c;
        i += 1;
    }
    out
}

impl IntPolynomial {
    /// Division that is exact over the rationals; the quotient is returned
    /// as a primitive integer polynomial scaled to make the division exact.
    fn div_exact_q(&self, b: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() {
            return IntPolynomial::zero();
        }
        let lb = b.lead();
        let e = (self.deg() + 1).saturating_sub(b.deg()) as u32;
        let scaled = self.scale(&num_traits::pow(lb, e as usize));
        let q = scaled.div_exact(b).expect("quotient not exact over Q");
        q.primitive_part()
    }
}

fn quick_squarefree(f: &IntPolynomial) -> bool {
    let lc = f.lead();
    for p in primes_up_to(400).into_iter().skip(1).take(40) {
        let p = p as u64;
        if (&lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fm = PolyMod::new(p, f.reduce_mod(p));
        if fm.deg() == f.deg() && fm.is_squarefree() {
            return true;
        }
    }
    false
}

fn modp(x: &BigInt, m: &BigInt) -> BigInt {
    x.mod_floor(m)
}

fn vnorm(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn vreduce(a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    vnorm(a.iter().map(|c| modp(c, m)).collect())
}

fn vadd(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let mut v = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default();
        v.push(modp(&x, m));
    }
    vnorm(v)
}

fn vsub(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let mut v = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default();
        v.push(modp(&x, m));
    }
    vnorm(v)
}

fn vmul(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut v = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            v[i + j] += x * y;
        }
    }
    vreduce(&v, m)
}

/// Division by a monic polynomial modulo m.
fn vdivrem(a: &[BigInt], d: &[BigInt], m: &BigInt) -> (Vec<BigInt>, Vec<BigInt>) {
    let dd = d.len() - 1;
    if a.len() <= dd {
        return (Vec::new(), a.to_vec());
    }
    let mut r = a.to_vec();
    let mut q = vec![BigInt::zero(); a.len() - dd];
    for k in (0..q.len()).rev() {
        let t = modp(&r[k + dd], m);
        if t.is_zero() {
            continue;
        }
        for (i, dc) in d.iter().enumerate() {
            r[k + i] = modp(&(&r[k + i] - &t * dc), m);
        }
        q[k] = t;
    }
    (vnorm(q), vreduce(&r, m))
}

fn to_big(p: &PolyMod) -> Vec<BigInt> {
    p.c.iter().map(|&x| BigInt::from(x)).collect()
}

fn inv_big(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    assert!(e.gcd.is_one(), "not invertible");
    modp(&e.x, m)
}

/// One quadratic Hensel step, lifting f = g h (mod m) with s g + t h = 1 to
/// modulus m2 dividing m^2. `h` is monic.
#[allow(clippy::type_complexity)]
fn hensel_step(
    f: &[BigInt],
    g: &[BigInt],
    h: &[BigInt],
    s: &[BigInt],
    t: &[BigInt],
    m2: &BigInt,
) -> (Vec<BigInt>, Vec<BigInt>, Vec<BigInt>, Vec<BigInt>) {
    let e = vsub(&vreduce(f, m2), &vmul(g, h, m2), m2);
    let (q, r) = vdivrem(&vmul(s, &e, m2), h, m2);
    let g2 = vadd(&vadd(g, &vmul(t, &e, m2), m2), &vmul(&q, g, m2), m2);
    let h2 = vadd(h, &r, m2);
    let one = vec![BigInt::one()];
    let b = vsub(&vadd(&vmul(s, &g2, m2), &vmul(t, &h2, m2), m2), &one, m2);
    let (c, d) = vdivrem(&vmul(s, &b, m2), &h2, m2);
    let s2 = vsub(s, &d, m2);
    let t2 = vsub(&vsub(t, &vmul(t, &b, m2), m2), &vmul(&c, &g2, m2), m2);
    (g2, h2, s2, t2)
}

/// Lift the monic modular factors of `f` (known modulo `pk`) to modulus `pk`.
fn lift_tree(f: &[BigInt], factors: &[PolyMod], p: u64, pk: &BigInt) -> Vec<Vec<BigInt>> {
    let lc = f.last().cloned().unwrap();
    if factors.len() == 1 {
        let inv = inv_big(&lc, pk);
        return vec![f.iter().map(|c| modp(&(c * &inv), pk)).collect()];
    }
    let mid = factors.len() / 2;
    let (left, right) = factors.split_at(mid);
    let lcp = modp(&lc, &BigInt::from(p)).to_u64().unwrap();
    let g0 = left.iter().fold(PolyMod::one(p), |a, b| a.mul(b)).scale(lcp);
    let h0 = right.iter().fold(PolyMod::one(p), |a, b| a.mul(b));
    let (one, s0, t0) = g0.xgcd(&h0);
    debug_assert_eq!(one.deg(), 0);
    let (mut g, mut h, mut s, mut t) = (to_big(&g0), to_big(&h0), to_big(&s0), to_big(&t0));
    let mut m = BigInt::from(p);
    while &m < pk {
        let m2 = (&m * &m).min(pk.clone());
        let (g2, h2, s2, t2) = hensel_step(f, &g, &h, &s, &t, &m2);
        g = g2;
        h = h2;
        s = s2;
        t = t2;
        m = m2;
    }
    let mut out = lift_tree(&g, left, p, pk);
    out.extend(lift_tree(&h, right, p, pk));
    out
}

fn symmetric(v: &[BigInt], m: &BigInt) -> IntPolynomial {
    let half: BigInt = m >> 1;
    IntPolynomial::new(
        v.iter()
            .map(|c| {
                let c = modp(c, m);
                if c > half {
                    c - m
                } else {
                    c
                }
            })
            .collect(),
    )
}

fn subset_sums(degs: &[usize], n: usize) -> BTreeSet<usize> {
    let mut reach = vec![false; n + 1];
    reach[0] = true;
    for &d in degs {
        for s in (d..=n).rev() {
            if reach[s - d] {
                reach[s] = true;
            }
        }
    }
    (1..n).filter(|&s| reach[s]).collect()
}

/// Factor a primitive squarefree polynomial of positive degree.
fn factor_squarefree_z(f: &IntPolynomial) -> Vec<IntPolynomial> {
    let n = f.deg();
    if n <= 1 {
        return vec![f.primitive_part()];
    }
    let lc = f.lead();
    let mut best: Option<(u64, Vec<usize>)> = None;
    let mut allowed: Option<BTreeSet<usize>> = None;
    let mut tried = 0;
    for p in primes_up_to(2000).into_iter().skip(1) {
        let p = p as u64;
        if (&lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fm = PolyMod::new(p, f.reduce_mod(p));
        if fm.deg() != n || !fm.is_squarefree() {
            continue;
        }
        let degs = factor_degrees(&fm);
        let sums = subset_sums(&degs, n);
        allowed = Some(match allowed {
            None => sums,
            Some(a) => a.intersection(&sums).cloned().collect(),
        });
        if best.as_ref().is_none_or(|(_, d)| degs.len() < d.len()) {
            best = Some((p, degs));
        }
        tried += 1;
        if allowed.as_ref().is_some_and(|a| a.is_empty()) || tried >= 12 {
            break;
        }
    }
    let allowed = allowed.expect("no suitable prime for factorization");
    if allowed.is_empty() {
        return vec![f.primitive_part()];
    }
    let (p, _) = best.unwrap();
    let fm = PolyMod::new(p, f.reduce_mod(p));
    let modf = factor_squarefree(&fm, 0x5eed);
    // coefficient bound for factors of lc * f
    let maxc = f.coeffs().iter().map(|c| c.abs()).max().unwrap();
    let bound: BigInt = lc.abs() * (BigInt::one() << n) * (&maxc * BigInt::from(n + 1)) * 2 + 1;
    let mut pk = BigInt::from(p);
    while pk <= bound {
        pk *= p;
    }
    let fcoeffs: Vec<BigInt> = f.coeffs().to_vec();
    let lifted = lift_tree(&fcoeffs, &modf, p, &pk);
    recombine(f, lifted, &pk, &allowed)
}

fn recombine(
    f: &IntPolynomial,
    mut pool: Vec<Vec<BigInt>>,
    pk: &BigInt,
    allowed: &BTreeSet<usize>,
) -> Vec<IntPolynomial> {
    let mut rest = f.clone();
    let mut found = Vec::new();
    let mut size = 1usize;
    while 2 * size <= pool.len() {
        let mut hit = None;
        let r = pool.len();
        let mut idx: Vec<usize> = (0..size).collect();
        'combos: loop {
            let deg: usize = idx.iter().map(|&i| pool[i].len() - 1).sum();
            let ok_deg = allowed.contains(&deg) || allowed.is_empty();
            if ok_deg {
                let lc = rest.lead();
                let lcv = vec![modp(&lc, pk)];
                // constant term filter
                let c0 = idx
                    .iter()
                    .fold(modp(&lc, pk), |a, &i| modp(&(a * &pool[i][0]), pk));
                let c0s = symmetric(&[c0], pk).coeff(0);
                let f0 = &rest.coeff(0) * &lc;
                let pass = c0s.is_zero() || f0.is_zero() || (&f0 % &c0s).is_zero();
                if pass {
                    let prod = idx.iter().fold(lcv, |a, &i| vmul(&a, &pool[i], pk));
                    let cand = symmetric(&prod, pk).primitive_part();
                    if let Some(q) = rest.div_exact(&cand) {
                        hit = Some((idx.clone(), cand, q));
                        break 'combos;
                    }
                }
            }
            // next combination
            let mut k = size;
            loop {
                if k == 0 {
                    break 'combos;
                }
                k -= 1;
                if idx[k] < r - size + k {
                    idx[k] += 1;
                    for j in k + 1..size {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
            }
        }
        match hit {
            Some((idx, cand, q)) => {
                found.push(cand);
                rest = q;
                for &i in idx.iter().rev() {
                    pool.remove(i);
                }
            }
            None => size += 1,
        }
    }
    if rest.deg() > 0 {
        found.push(rest.primitive_part());
    }
    found
}

/// Complete factorization over the integers.
pub fn factor_z(f: &IntPolynomial) -> ZFactorization {
    assert!(!f.is_zero(), "factorization of zero polynomial");
    let mut content = f.content();
    if f.lead().is_negative() {
        content = -content;
    }
    let mut factors = Vec::new();
    let pp = f.primitive_part();
    // pull out powers of x first
    let xpow = pp.coeffs().iter().take_while(|c| c.is_zero()).count();
    let core = IntPolynomial::new(pp.coeffs()[xpow..].to_vec());
    if xpow > 0 {
        factors.push((IntPolynomial::x(), xpow as u32));
    }
    for (g, e) in squarefree_decomposition(&core) {
        for h in factor_squarefree_z(&g) {
            factors.push((h, e));
        }
    }
    factors.sort_by(|(a, _), (b, _)| (a.deg(), a.coeffs()).cmp(&(b.deg(), b.coeffs())));
    ZFactorization { content, factors }
}

pub fn is_irreducible(f: &IntPolynomial) -> bool {
    let z = factor_z(f);
    z.factors.len() == 1 && z.factors[0].1 == 1 && z.factors[0].0.deg() == f.deg()
}

/// Rational roots, sorted, from the linear factors.
pub fn rational_roots(f: &IntPolynomial) -> Vec<num_rational::BigRational> {
    let mut out: Vec<num_rational::BigRational> = factor_z(f)
        .factors
        .iter()
        .filter(|(g, _)| g.deg() == 1)
        .map(|(g, _)| num_rational::BigRational::new(-g.coeff(0), g.coeff(1)))
        .collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::cyclotomic::cyclotomic;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn gcd_basic() {
        let a = &p(&[-1, 1]) * &p(&[1, 1, 1]);
        let b = &p(&[-1, 1]) * &p(&[3, 2]);
        assert_eq!(poly_gcd(&a, &b), p(&[-1, 1]));
    }

    #[test]
    fn x_pow_minus_one_splits_into_cyclotomics() {
        let f = IntPolynomial::x_pow_minus_one(12);
        let z = factor_z(&f);
        let mut expect: Vec<IntPolynomial> = [1u64, 2, 3, 4, 6, 12].iter().map(|&d| cyclotomic(d)).collect();
        expect.sort_by(|a, b| (a.deg(), a.coeffs()).cmp(&(b.deg(), b.coeffs())));
        let got: Vec<IntPolynomial> = z.factors.iter().map(|(g, _)| g.clone()).collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn swinnerton_dyer_like_product() {
        // (x^4 - 10x^2 + 1)(x^2 - 2)(3x + 5): modular factorizations split
        // the quartic everywhere, so recombination is exercised
        let a = p(&[1, 0, -10, 0, 1]);
        let f = &(&a * &p(&[-2, 0, 1])) * &p(&[5, 3]);
        let z = factor_z(&f);
        assert_eq!(z.degrees(), vec![1, 2, 4]);
        assert!(z.factors.iter().any(|(g, _)| *g == a));
    }

    #[test]
    fn repeated_factors() {
        let f = &p(&[1, 1]).pow(3) * &p(&[1, 0, 1]).pow(2);
        let z = factor_z(&f.scale(&BigInt::from(-6)));
        assert_eq!(z.content, BigInt::from(-6));
        assert_eq!(z.factors, vec![(p(&[1, 1]), 3), (p(&[1, 0, 1]), 2)]);
    }

    #[test]
    fn irreducibility() {
        assert!(is_irreducible(&p(&[1, -4, 0, 4])));
        assert!(is_irreducible(&cyclotomic(105)));
        assert!(!is_irreducible(&p(&[0, -1, 0, 1])));
    }

    #[test]
    fn rational_root_list() {
        let f = &p(&[-1, 2]) * &p(&[3, 1]);
        let r = rational_roots(&f);
        assert_eq!(r.len(), 2);
        assert_eq!(r[0], num_rational::BigRational::from_integer(BigInt::from(-3)));
    }
}
