//! Resultants over the integers by the subresultant polynomial remainder
//! sequence.

use super::poly::IntPolynomial;
use crate::error::{LabError, Result};
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// `Res(f, g) = lead(f)^deg g * prod_{f(b)=0} g(b)`, with
/// `Res(f, g) = (-1)^(deg f deg g) Res(g, f)`.
pub fn resultant(f: &IntPolynomial, g: &IntPolynomial) -> Result<BigInt> {
    if f.is_zero() || g.is_zero() {
        return Err(LabError::UndefinedResultant);
    }
    let (df, dg) = (f.deg(), g.deg());
    if df == 0 {
        return Ok(num_traits::pow(f.lead(), dg));
    }
    if dg == 0 {
        return Ok(num_traits::pow(g.lead(), df));
    }
    let ca = f.content();
    let cb = g.content();
    let mut a = f.div_scalar_exact(&ca);
    let mut b = g.div_scalar_exact(&cb);
    let t = num_traits::pow(ca, dg) * num_traits::pow(cb, df);
    let mut s = BigInt::one();
    if a.deg() < b.deg() {
        std::mem::swap(&mut a, &mut b);
        if (a.deg() % 2 == 1) && (b.deg() % 2 == 1) {
            s = -s;
        }
    }
    let mut gg = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let da = a.deg();
        let db = b.deg();
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
        let r = a.pseudo_rem(&b);
        a = b;
        if r.is_zero() {
            return Ok(BigInt::zero());
        }
        let divisor = &gg * num_traits::pow(h.clone(), delta);
        b = r.div_scalar_exact(&divisor);
        gg = a.lead();
        // h <- h^(1 - delta) g^delta
        h = if delta == 0 {
            h
        } else {
            let num = num_traits::pow(gg.clone(), delta);
            let den = num_traits::pow(h.clone(), delta - 1);
            exact_div(&num, &den)
        };
        if b.deg() == 0 {
            let da = a.deg();
            let lb = b.lead();
            let hh = if da == 0 {
                h
            } else {
                exact_div(&num_traits::pow(lb, da), &num_traits::pow(h, da - 1))
            };
            return Ok(s * t * hh);
        }
    }
}

fn exact_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = num_integer::Integer::div_rem(a, b);
    debug_assert!(r.is_zero(), "subresultant division not exact");
    q
}

/// `Res(bx - a, g) = b^deg g * g(a/b)`, the homogenized value, used as a fast
/// path for rational arguments.
pub fn resultant_linear(a: &BigInt, b: &BigInt, g: &IntPolynomial) -> BigInt {
    g.eval_homogeneous(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::cyclotomic::cyclotomic;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn evaluation_identity() {
        // Res(x - 2, Phi_4) = Phi_4(2) = 5
        assert_eq!(resultant(&p(&[-2, 1]), &cyclotomic(4)).unwrap(), BigInt::from(5));
        assert_eq!(resultant(&cyclotomic(6), &cyclotomic(3)).unwrap(), BigInt::from(4));
    }

    #[test]
    fn constant_argument() {
        let f = p(&[1, 2, 3, 4]);
        assert_eq!(resultant(&f, &p(&[5])).unwrap(), BigInt::from(125));
        assert_eq!(resultant(&p(&[5]), &f).unwrap(), BigInt::from(125));
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        assert_eq!(resultant(&IntPolynomial::zero(), &p(&[1, 1])), Err(LabError::UndefinedResultant));
    }

    #[test]
    fn sign_convention() {
        let f = p(&[1, 0, 1, 2]);
        let g = p(&[3, -1, 0, 0, 1, 1]);
        let r1 = resultant(&f, &g).unwrap();
        let r2 = resultant(&g, &f).unwrap();
        // (-1)^(3*5) = -1
        assert_eq!(r1, -r2);
    }

    #[test]
    fn common_root_gives_zero() {
        let f = &p(&[-1, 1]) * &p(&[2, 0, 1]);
        let g = &p(&[-1, 1]) * &p(&[5, 1]);
        assert!(resultant(&f, &g).unwrap().is_zero());
    }

    #[test]
    fn linear_fast_path_agrees() {
        let g = cyclotomic(15);
        let (a, b) = (BigInt::from(-5), BigInt::from(3));
        let f = IntPolynomial::new(vec![-a.clone(), b.clone()]);
        assert_eq!(resultant(&f, &g).unwrap(), resultant_linear(&a, &b, &g));
    }
}
