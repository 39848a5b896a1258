//! Multivariate sums of affine powers `f = Σ αᵢ ℓᵢ(x)^eᵢ` from black-box
//! access. A random affine change of coordinates makes every axis
//! projection a univariate instance; the per-axis decompositions are
//! matched and pulled back.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decompose::{decompose_with, AlgorithmTag};
use crate::linalg::QMatrix;
use crate::multipoly::{LinearForm, MultiPoly};
use crate::poly::UniPoly;
use crate::rational::{self, int, Rational};
use crate::{Error, Result};

/// Entries of the random change are drawn from `1..=SAMPLE_MAX`.
pub const SAMPLE_MAX: u64 = 1 << 32;
/// Number of random points used to check a reconstruction.
pub const VERIFY_POINTS: usize = 50;
/// Coordinates of verification points lie in `[-VERIFY_RANGE, VERIFY_RANGE]`.
pub const VERIFY_RANGE: i64 = 1_000_000;

type EvalFn = dyn Fn(&[Rational]) -> Rational + Send + Sync;

/// Evaluation-only access to a polynomial in `n` variables of degree at
/// most `degree_bound`. Counts queries.
pub struct BlackBox {
    n: usize,
    degree_bound: usize,
    eval: Box<EvalFn>,
    queries: AtomicU64,
}

impl BlackBox {
    pub fn new<F>(n: usize, degree_bound: usize, eval: F) -> Self
    where
        F: Fn(&[Rational]) -> Rational + Send + Sync + 'static,
    {
        BlackBox { n, degree_bound, eval: Box::new(eval), queries: AtomicU64::new(0) }
    }

    /// Wraps a dense polynomial; the degree bound is its total degree.
    pub fn from_multipoly(f: MultiPoly) -> Self {
        let n = f.nvars();
        let d = f.total_degree();
        BlackBox::new(n, d, move |x| f.eval(x).expect("black box called with the wrong arity"))
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: point.len() });
        }
        self.queries.fetch_add(1, Ordering::Relaxed);
        Ok((self.eval)(point))
    }

    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }
}

impl fmt::Debug for BlackBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlackBox")
            .field("n", &self.n)
            .field("degree_bound", &self.degree_bound)
            .field("queries", &self.queries())
            .finish()
    }
}

/// `x ↦ Λx + λ` with `Λ` invertible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineChange {
    matrix: QMatrix,
    offset: Vec<Rational>,
    inverse: QMatrix,
}

impl AffineChange {
    pub fn new(matrix: QMatrix, offset: Vec<Rational>) -> Result<Self> {
        let n = matrix.rows();
        if matrix.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: matrix.cols() });
        }
        if offset.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: offset.len() });
        }
        let inverse = matrix.inverse().ok_or(Error::SingularChange)?;
        Ok(AffineChange { matrix, offset, inverse })
    }

    pub fn identity(n: usize) -> Self {
        AffineChange::new(QMatrix::identity(n), vec![Rational::zero(); n]).expect("identity is invertible")
    }

    /// Entries of `Λ` and `λ` uniform in `1..=SAMPLE_MAX`; resamples until
    /// `Λ` is invertible.
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        loop {
            let mut draw = || Rational::from_integer(rng.gen_range(1..=SAMPLE_MAX).into());
            let entries: Vec<Rational> = (0..n * n).map(|_| draw()).collect();
            let offset: Vec<Rational> = (0..n).map(|_| draw()).collect();
            let matrix = QMatrix::new(n, n, entries).expect("square");
            if let Ok(c) = AffineChange::new(matrix, offset) {
                return c;
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.offset.len()
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.matrix
    }

    pub fn offset(&self) -> &[Rational] {
        &self.offset
    }

    pub fn apply(&self, y: &[Rational]) -> Result<Vec<Rational>> {
        let mut x = self.matrix.mul_vec(y)?;
        for (xi, li) in x.iter_mut().zip(&self.offset) {
            *xi += li;
        }
        Ok(x)
    }

    /// Rewrites `1 + p·y` (with `x = Λy + λ`) as a form in `x`.
    fn pull_back(&self, p: &[Rational]) -> LinearForm {
        let w = self.inverse.transpose().mul_vec(p).expect("dimensions agree");
        let shift = w.iter().zip(&self.offset).fold(Rational::zero(), |acc, (a, b)| acc + a * b);
        LinearForm::new(Rational::one() - shift, w)
    }
}

/// One term `coeff · form^exponent`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiTerm {
    #[serde(with = "rational::serde_str")]
    pub coeff: Rational,
    pub form: LinearForm,
    pub exponent: usize,
}

impl MultiTerm {
    pub fn new(coeff: Rational, form: LinearForm, exponent: usize) -> Result<Self> {
        if !form.is_nonconstant() {
            return Err(Error::ConstantForm);
        }
        Ok(MultiTerm { coeff, form, exponent })
    }

    /// Scales the form so its first nonzero variable coefficient is 1.
    fn normalized(self) -> Self {
        let lead = self.form.coeffs.iter().find(|c| !c.is_zero()).expect("nonconstant").clone();
        if lead.is_one() {
            return self;
        }
        MultiTerm {
            coeff: self.coeff * rational::pow(&lead, self.exponent),
            form: self.form.scale(&lead.recip()),
            exponent: self.exponent,
        }
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        Ok(&self.coeff * rational::pow(&self.form.eval(point)?, self.exponent))
    }

    pub fn expand(&self) -> MultiPoly {
        self.form.to_multipoly().pow(self.exponent).scale(&self.coeff)
    }
}

impl fmt::Display for MultiTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} * ({}", rational::format_rational(&self.coeff), rational::format_rational(&self.form.constant))?;
        for (i, a) in self.form.coeffs.iter().enumerate() {
            if !a.is_zero() {
                write!(f, " + {}*x{}", rational::format_rational(a), i + 1)?;
            }
        }
        write!(f, ")^{}", self.exponent)
    }
}

/// Canonical multiset of terms: forms scaled to a leading variable
/// coefficient of 1, sorted by exponent descending then form, merged and
/// with zero coefficients dropped. Two decompositions are essentially
/// equal iff their canonical forms are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct MultiDecomposition {
    n: usize,
    terms: Vec<MultiTerm>,
}

impl MultiDecomposition {
    pub fn new(n: usize, terms: impl IntoIterator<Item = MultiTerm>) -> Result<Self> {
        let mut out = Vec::new();
        for t in terms {
            if t.form.nvars() != n {
                return Err(Error::DimensionMismatch { expected: n, found: t.form.nvars() });
            }
            if !t.form.is_nonconstant() {
                return Err(Error::ConstantForm);
            }
            out.push(t.normalized());
        }
        out.sort_by(|a, b| b.exponent.cmp(&a.exponent).then_with(|| a.form.cmp(&b.form)));
        let mut merged: Vec<MultiTerm> = Vec::with_capacity(out.len());
        for t in out {
            match merged.last_mut() {
                Some(last) if last.exponent == t.exponent && last.form == t.form => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        Ok(MultiDecomposition { n, terms: merged })
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[MultiTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        self.terms.iter().try_fold(Rational::zero(), |acc, t| Ok(acc + t.eval(point)?))
    }

    pub fn expand(&self) -> MultiPoly {
        expand_multi(self)
    }
}

impl fmt::Display for MultiDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

#[derive(Deserialize)]
struct MultiDecompositionJson {
    n: usize,
    terms: Vec<MultiTerm>,
}

impl<'de> Deserialize<'de> for MultiDecomposition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MultiDecompositionJson::deserialize(d)?;
        MultiDecomposition::new(j.n, j.terms).map_err(serde::de::Error::custom)
    }
}

pub fn expand_multi(d: &MultiDecomposition) -> MultiPoly {
    d.terms.iter().fold(MultiPoly::zero(d.n), |acc, t| acc.add(&t.expand()))
}

/// `x ↦ f(Λ·(x e_axis) + λ)`, interpolated from `degree_bound + 1` queries
/// at `x = 0, 1, …`. `axis` is 0-based.
pub fn project_to_axis(bb: &BlackBox, change: &AffineChange, axis: usize) -> Result<UniPoly> {
    let n = bb.nvars();
    if change.nvars() != n {
        return Err(Error::DimensionMismatch { expected: n, found: change.nvars() });
    }
    if axis >= n {
        return Err(Error::DimensionMismatch { expected: n, found: axis + 1 });
    }
    let points = (0..=bb.degree_bound())
        .map(|k| {
            let mut y = vec![Rational::zero(); n];
            y[axis] = int(k as i64);
            Ok((int(k as i64), bb.eval(&change.apply(&y)?)?))
        })
        .collect::<Result<Vec<_>>>()?;
    UniPoly::interpolate(&points)
}

/// Per-axis triplet `(c, p, e)` with `g_axis = Σ c (1 + p x)^e`.
struct AxisTerm {
    c: Rational,
    p: Rational,
    e: usize,
}

fn axis_terms(g: &UniPoly, backend: AlgorithmTag) -> Result<Vec<AxisTerm>> {
    let dec = decompose_with(g, backend)?;
    dec.terms()
        .iter()
        .map(|t| {
            // β (x − a)^e = β (−a)^e (1 + x/(−a))^e
            let b = -&t.node;
            if b.is_zero() {
                return Err(Error::ReconstructionFailed("projected node is zero".into()));
            }
            Ok(AxisTerm { c: &t.coeff * rational::pow(&b, t.exponent), p: b.recip(), e: t.exponent })
        })
        .collect()
}

fn mismatch(msg: &str) -> Error {
    Error::ReconstructionFailed(msg.into())
}

fn attempt(bb: &BlackBox, change: &AffineChange, backend: AlgorithmTag) -> Result<MultiDecomposition> {
    let n = bb.nvars();
    let projections = (0..n)
        .into_par_iter()
        .map(|j| project_to_axis(bb, change, j))
        .collect::<Result<Vec<_>>>()?;
    if projections.iter().all(UniPoly::is_zero) {
        return MultiDecomposition::new(n, []);
    }
    let axes = projections
        .par_iter()
        .map(|g| axis_terms(g, backend))
        .collect::<Result<Vec<_>>>()?;

    let s = axes[0].len();
    if axes.iter().any(|a| a.len() != s) {
        return Err(mismatch("axis projections have different term counts"));
    }
    let mut keyed: Vec<HashMap<(&Rational, usize), &Rational>> = Vec::with_capacity(n);
    for a in &axes {
        let mut m = HashMap::with_capacity(s);
        let mut cs: Vec<&Rational> = a.iter().map(|t| &t.c).collect();
        cs.sort();
        if cs.windows(2).any(|w| w[0] == w[1]) {
            return Err(mismatch("repeated scaled coefficient within an axis"));
        }
        for t in a {
            m.insert((&t.c, t.e), &t.p);
        }
        keyed.push(m);
    }
    let mut terms = Vec::with_capacity(s);
    for t in &axes[0] {
        let p = keyed
            .iter()
            .map(|m| m.get(&(&t.c, t.e)).map(|p| (*p).clone()))
            .collect::<Option<Vec<Rational>>>()
            .ok_or_else(|| mismatch("term keys differ between axes"))?;
        terms.push(MultiTerm::new(t.c.clone(), change.pull_back(&p), t.e)?);
    }
    MultiDecomposition::new(n, terms)
}

fn agrees<R: Rng>(bb: &BlackBox, d: &MultiDecomposition, rng: &mut R) -> Result<bool> {
    let points: Vec<Vec<Rational>> = (0..VERIFY_POINTS)
        .map(|_| (0..bb.nvars()).map(|_| int(rng.gen_range(-VERIFY_RANGE..=VERIFY_RANGE))).collect())
        .collect();
    let checks = points
        .par_iter()
        .map(|x| Ok(bb.eval(x)? == d.eval(x)?))
        .collect::<Result<Vec<bool>>>()?;
    Ok(checks.into_iter().all(|ok| ok))
}

/// Randomized reconstruction from black-box access. Makes `retries + 1`
/// attempts, each with a fresh change of coordinates drawn from a ChaCha
/// stream seeded by `seed`; a result is returned only after agreeing with
/// `bb` on [`VERIFY_POINTS`] random points.
pub fn multi_build(bb: &BlackBox, seed: u64, backend: AlgorithmTag, retries: usize) -> Result<MultiDecomposition> {
    if bb.nvars() == 0 {
        return Err(Error::DimensionMismatch { expected: 1, found: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = mismatch("no attempt made");
    for _ in 0..=retries {
        let change = AffineChange::random(bb.nvars(), &mut rng);
        match attempt(bb, &change, backend) {
            Ok(d) => {
                if agrees(bb, &d, &mut rng)? {
                    return Ok(d);
                }
                last = mismatch("reconstruction disagrees with the black box");
            }
            Err(e) if e.is_algorithmic() => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// [`multi_build`] on a dense input, additionally checked by full
/// expansion.
pub fn multi_build_poly(f: &MultiPoly, seed: u64, backend: AlgorithmTag, retries: usize) -> Result<MultiDecomposition> {
    let d = multi_build(&BlackBox::from_multipoly(f.clone()), seed, backend, retries)?;
    if &expand_multi(&d) != f {
        return Err(mismatch("expansion does not match the input"));
    }
    Ok(d)
}
