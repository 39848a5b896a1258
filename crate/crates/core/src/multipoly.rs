//! Sparse multivariate polynomials and affine linear forms.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};
use crate::{Error, Result};

/// Sparse polynomial in `n` variables: exponent vector -> nonzero coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    n: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MultiPoly {
    pub fn zero(n: usize) -> Self {
        MultiPoly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        let mut p = Self::zero(n);
        p.add_term(vec![0; n], c);
        p
    }

    /// The variable `x_i` (0-based).
    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        let mut p = Self::zero(n);
        p.add_term(e, Rational::one());
        p
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Vec<u32>, Rational)>) -> Result<Self> {
        let mut p = Self::zero(n);
        for (e, c) in terms {
            if e.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: e.len() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        MultiPoly {
            n: self.n,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = Self::zero(self.n);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, mut e: usize) -> MultiPoly {
        let mut acc = Self::constant(self.n, Rational::one());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact evaluation at a point of length `n`.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: point.len() });
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t *= rational::pow(x, k as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }
}

/// Free-function form of [`MultiPoly::eval`].
pub fn multi_eval(f: &MultiPoly, point: &[Rational]) -> Result<Rational> {
    f.eval(point)
}

#[derive(Serialize, Deserialize)]
struct MultiTermJson {
    exps: Vec<u32>,
    #[serde(with = "rational::serde_str")]
    coeff: Rational,
}

#[derive(Serialize, Deserialize)]
struct MultiPolyJson {
    n: usize,
    terms: Vec<MultiTermJson>,
}

impl Serialize for MultiPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MultiPolyJson {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| MultiTermJson { exps: e.clone(), coeff: c.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MultiPolyJson::deserialize(d)?;
        MultiPoly::from_terms(j.n, j.terms.into_iter().map(|t| (t.exps, t.coeff)))
            .map_err(serde::de::Error::custom)
    }
}

/// Affine form `constant + Σ coeffs[i] x_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinearForm {
    #[serde(with = "rational::serde_str")]
    pub constant: Rational,
    #[serde(with = "rational::serde_str::vec")]
    pub coeffs: Vec<Rational>,
}

impl LinearForm {
    pub fn new(constant: Rational, coeffs: Vec<Rational>) -> Self {
        LinearForm { constant, coeffs }
    }

    pub fn nvars(&self) -> usize {
        self.coeffs.len()
    }

    /// At least one variable coefficient is nonzero.
    pub fn is_nonconstant(&self) -> bool {
        self.coeffs.iter().any(|c| !c.is_zero())
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.coeffs.len() {
            return Err(Error::DimensionMismatch { expected: self.coeffs.len(), found: point.len() });
        }
        Ok(self
            .coeffs
            .iter()
            .zip(point)
            .fold(self.constant.clone(), |acc, (a, x)| acc + a * x))
    }

    pub fn scale(&self, c: &Rational) -> LinearForm {
        LinearForm {
            constant: &self.constant * c,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn to_multipoly(&self) -> MultiPoly {
        let n = self.coeffs.len();
        let mut p = MultiPoly::constant(n, self.constant.clone());
        for (i, a) in self.coeffs.iter().enumerate() {
            p = p.add(&MultiPoly::var(n, i).scale(a));
        }
        p
    }

    /// True when `self = μ · other` for some nonzero `μ`.
    pub fn is_proportional(&self, other: &LinearForm) -> bool {
        if self.coeffs.len() != other.coeffs.len() {
            return false;
        }
        let a: Vec<&Rational> = std::iter::once(&self.constant).chain(&self.coeffs).collect();
        let b: Vec<&Rational> = std::iter::once(&other.constant).chain(&other.coeffs).collect();
        let Some(k) = a.iter().position(|x| !x.is_zero()) else {
            return b.iter().all(|x| x.is_zero());
        };
        if b[k].is_zero() {
            return false;
        }
        let mu = a[k] / b[k];
        a.iter().zip(&b).all(|(x, y)| **x == &mu * *y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn pt(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn eval_examples() {
        let x1x2 = MultiPoly::var(2, 0).mul(&MultiPoly::var(2, 1));
        assert_eq!(multi_eval(&x1x2, &pt(&[2, 3])).unwrap(), int(6));
        let l = LinearForm::new(int(1), pt(&[1, 2])).to_multipoly();
        assert_eq!(multi_eval(&l.pow(2), &pt(&[0, 0])).unwrap(), int(1));
        let m = LinearForm::new(int(0), pt(&[1, -1])).to_multipoly();
        let f = l.pow(3).add(&m.pow(2));
        assert_eq!(multi_eval(&f, &pt(&[1, 1])).unwrap(), int(64));
        assert_eq!(
            multi_eval(&f, &pt(&[1])),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        );
    }

    #[test]
    fn cancellation_removes_terms() {
        let x = MultiPoly::var(1, 0);
        let z = x.add(&x.scale(&int(-1)));
        assert!(z.is_zero());
    }

    #[test]
    fn json_form() {
        let f = MultiPoly::from_terms(2, vec![(vec![13, 0], int(1)), (vec![0, 2], int(-3))]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"n":2,"terms":[{"exps":[0,2],"coeff":"-3"},{"exps":[13,0],"coeff":"1"}]}"#);
        let back: MultiPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<MultiPoly>(r#"{"n":2,"terms":[{"exps":[1],"coeff":"1"}]}"#).is_err());
    }

    #[test]
    fn proportional_forms() {
        let a = LinearForm::new(int(2), pt(&[4, -2]));
        let b = LinearForm::new(int(-1), pt(&[-2, 1]));
        assert!(a.is_proportional(&b));
        assert!(!a.is_proportional(&LinearForm::new(int(1), pt(&[2, 1]))));
    }
}
