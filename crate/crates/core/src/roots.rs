//! Rational roots of rational polynomials.
//!
//! Candidates from the rational root theorem would need the divisors of the
//! leading and constant coefficients, which is hopeless once coefficients
//! reach hundreds of bits. Instead the squarefree part is reduced modulo a
//! good prime, its roots there are Hensel-lifted, and each lift is turned
//! back into a rational candidate and checked exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly::UniPoly;
use crate::rational::Rational;
use crate::{Error, Result};

/// All rational roots of `f` with multiplicities, sorted ascending.
pub fn rational_roots(f: &UniPoly) -> Result<Vec<(Rational, usize)>> {
    let deg = f.degree().ok_or(Error::ZeroPolynomial)?;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let mut roots = Vec::new();
    let zero_mult = f.coeffs().iter().take_while(|c| c.is_zero()).count();
    if zero_mult > 0 {
        roots.push((Rational::zero(), zero_mult));
    }
    let stripped = UniPoly::new(f.coeffs()[zero_mult..].to_vec());
    if stripped.degree().unwrap_or(0) > 0 {
        let sqf = squarefree_part(&stripped);
        for r in simple_rational_roots(&sqf) {
            let m = f.mult_at(&r)?;
            roots.push((r, m));
        }
    }
    roots.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(roots)
}

/// Degree of `f` left after dividing out every rational root (with
/// multiplicity). Positive means irreducible factors of degree >= 2 remain.
pub fn irrational_degree(f: &UniPoly, roots: &[(Rational, usize)]) -> usize {
    f.degree().unwrap_or(0) - roots.iter().map(|(_, m)| m).sum::<usize>()
}

fn squarefree_part(f: &UniPoly) -> UniPoly {
    let g = f.gcd(&f.derivative(1));
    if g.degree().unwrap_or(0) == 0 {
        return f.clone();
    }
    f.div_rem(&g).expect("gcd is nonzero").0
}

/// Rational roots of a squarefree polynomial with nonzero constant term.
fn simple_rational_roots(f: &UniPoly) -> Vec<Rational> {
    let ints = f.primitive_integer();
    let deg = ints.len() - 1;
    if deg == 1 {
        return vec![Rational::new(-ints[0].clone(), ints[1].clone())];
    }
    let lc = ints[deg].clone();
    let c0 = ints[0].clone();
    let bound: BigInt = BigInt::from(2) * lc.abs() * c0.abs() + 1;
    let deriv: Vec<BigInt> = (1..=deg).map(|i| &ints[i] * BigInt::from(i)).collect();

    let p = good_prime(&ints);
    let fp: Vec<u64> = reduce(&ints, p);
    let mut out = Vec::new();
    for r0 in 0..p {
        if eval_mod(&fp, r0, p) != 0 {
            continue;
        }
        let lifted = hensel_lift(&ints, &deriv, BigInt::from(r0), p, &bound);
        let (r, m) = lifted;
        let mut v = (&lc * r).mod_floor(&m);
        if &v * 2 > m {
            v -= &m;
        }
        let cand = Rational::new(v, lc.clone());
        if f.eval(&cand).is_zero() {
            out.push(cand);
        }
    }
    out
}

fn hensel_lift(f: &[BigInt], df: &[BigInt], mut r: BigInt, p: u64, bound: &BigInt) -> (BigInt, BigInt) {
    let mut m = BigInt::from(p);
    while &m <= bound {
        let m2 = &m * &m;
        let fv = eval_big(f, &r).mod_floor(&m2);
        let dv = eval_big(df, &r).mod_floor(&m2);
        let inv = mod_inverse(&dv, &m2).expect("simple root has invertible derivative");
        r = (&r - fv * inv).mod_floor(&m2);
        m = m2;
    }
    (r, m)
}

fn eval_big(c: &[BigInt], x: &BigInt) -> BigInt {
    c.iter().rev().fold(BigInt::zero(), |acc, a| acc * x + a)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// A prime not dividing the leading coefficient for which `f mod p` stays
/// squarefree. Only finitely many primes fail, so the scan terminates.
fn good_prime(f: &[BigInt]) -> u64 {
    let mut p = 97u64;
    loop {
        p = next_prime(p);
        let fp = reduce(f, p);
        if fp.len() != f.len() {
            continue;
        }
        let dfp: Vec<u64> = (1..fp.len()).map(|i| fp[i] * (i as u64 % p) % p).collect();
        let g = gcd_mod(fp.clone(), trim(dfp), p);
        if g.len() == 1 {
            return p;
        }
    }
}

fn next_prime(mut n: u64) -> u64 {
    loop {
        n += 1;
        if n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d)) {
            return n;
        }
    }
}

fn reduce(f: &[BigInt], p: u64) -> Vec<u64> {
    let pb = BigInt::from(p);
    trim(
        f.iter()
            .map(|c| c.mod_floor(&pb).to_u64().expect("residue fits in u64"))
            .collect(),
    )
}

fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn eval_mod(f: &[u64], x: u64, p: u64) -> u64 {
    f.iter().rev().fold(0u64, |acc, &c| (acc * x + c) % p)
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn rem_mod(mut a: Vec<u64>, b: &[u64], p: u64) -> Vec<u64> {
    let db = b.len() - 1;
    let inv = pow_mod(b[db], p - 2, p);
    while a.len() > db {
        let k = a.len() - 1 - db;
        let c = a[a.len() - 1] * inv % p;
        for (i, bc) in b.iter().enumerate() {
            a[k + i] = (a[k + i] + p - c * bc % p) % p;
        }
        a = trim(a);
        if a.is_empty() {
            break;
        }
    }
    a
}

fn gcd_mod(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    while !b.is_empty() {
        let r = rem_mod(a, &b, p);
        a = b;
        b = r;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn spec_examples() {
        let f = UniPoly::from_ints(&[1, -5, 6]);
        assert_eq!(rational_roots(&f).unwrap(), vec![(frac(1, 3), 1), (frac(1, 2), 1)]);
        assert!(rational_roots(&UniPoly::from_ints(&[1, 0, 1])).unwrap().is_empty());
        let cube = UniPoly::affine_power(&int(2), 3);
        assert_eq!(rational_roots(&cube).unwrap(), vec![(int(2), 3)]);
        assert_eq!(rational_roots(&UniPoly::zero()), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn zero_root_and_constants() {
        let f = &UniPoly::monomial(int(1), 3) * &UniPoly::from_ints(&[-2, 0, 1]);
        assert_eq!(rational_roots(&f).unwrap(), vec![(int(0), 3)]);
        assert!(rational_roots(&UniPoly::from_ints(&[5])).unwrap().is_empty());
        assert_eq!(irrational_degree(&f, &rational_roots(&f).unwrap()), 2);
    }

    #[test]
    fn huge_coefficients() {
        let a = Rational::new(BigInt::from(4_000_000_123u64), BigInt::from(2_999_999_929u64));
        let b = Rational::new(BigInt::from(7 - (1i64 << 40)), BigInt::from(3));
        let f = &(&UniPoly::affine_power(&a, 2) * &UniPoly::affine_power(&b, 1))
            * &UniPoly::from_ints(&[3, 0, 1]);
        let mut expect = vec![(a, 2), (b, 1)];
        expect.sort_by(|x, y| x.0.cmp(&y.0));
        assert_eq!(rational_roots(&f).unwrap(), expect);
    }
}
