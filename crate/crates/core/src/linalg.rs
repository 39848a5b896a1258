//! Exact linear algebra over the rationals.
//!
//! Rows are scaled to integers and reduced with fraction-free (Bareiss)
//! elimination; every intermediate entry is then a minor of the input, which
//! keeps growth polynomial. Back-substitution is done in rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::rational::{self, Rational};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

/// Result of [`solve`]: `unique` is false when free variables were set to 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub x: Vec<Rational>,
    pub unique: bool,
}

impl QMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: entries.len() });
        }
        Ok(QMatrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        if let Some(bad) = rows.iter().find(|v| v.len() != c) {
            return Err(Error::DimensionMismatch { expected: c, found: bad.len() });
        }
        Ok(QMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() })
    }

    /// Builds the matrix whose columns are the given vectors, each padded
    /// with zeros to `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col.iter().enumerate().take(rows) {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| rational::int(v)).collect()).collect())
            .expect("rectangular input")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: x.len() });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn mul(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Inverse of a square matrix, `None` when singular.
    pub fn inverse(&self) -> Option<QMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![Rational::zero(); n];
            e[j] = Rational::one();
            let s = solve(self, &e).ok()?;
            if !s.unique {
                return None;
            }
            cols.push(s.x);
        }
        Some(QMatrix::from_columns(n, &cols))
    }

    fn integer_rows(&self, extra: Option<&[Rational]>) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let mut row: Vec<Rational> = self.row(i).to_vec();
                if let Some(b) = extra {
                    row.push(b[i].clone());
                }
                let l = rational::denominator_lcm(&row);
                row.iter().map(|r| (r * &l).to_integer()).collect()
            })
            .collect()
    }
}

/// Row echelon form produced by fraction-free elimination.
struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

fn fraction_free_echelon(mut a: Vec<Vec<BigInt>>, cols: usize) -> Echelon {
    let m = a.len();
    let mut r = 0;
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    for c in 0..cols {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (head, tail) = a.split_at_mut(r + 1);
        let prow = &head[r];
        let piv = &prow[c];
        for row in tail.iter_mut() {
            let lead = std::mem::take(&mut row[c]);
            for j in c + 1..cols {
                let v = piv * &row[j] - &lead * &prow[j];
                row[j] = exact_div(v, &prev);
            }
        }
        prev = piv.clone();
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    Echelon { rows: a, pivots }
}

fn exact_div(v: BigInt, d: &BigInt) -> BigInt {
    if d.is_one() {
        return v;
    }
    let (q, rem) = v.div_rem(d);
    debug_assert!(rem.is_zero(), "Bareiss division must be exact");
    q
}

pub fn rank(a: &QMatrix) -> usize {
    fraction_free_echelon(a.integer_rows(None), a.cols).pivots.len()
}

/// Basis of the right null space. Vectors are primitive integers (as
/// rationals) with the first nonzero entry positive, ordered by their free
/// column.
pub fn kernel(a: &QMatrix) -> Vec<Vec<Rational>> {
    let ech = fraction_free_echelon(a.integer_rows(None), a.cols);
    let mut is_pivot = vec![false; a.cols];
    for &p in &ech.pivots {
        is_pivot[p] = true;
    }
    (0..a.cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut x = vec![Rational::zero(); a.cols];
            x[free] = Rational::one();
            back_substitute(&ech, &mut x, None);
            rational::primitive_integer_vector(&x)
                .into_iter()
                .map(Rational::from_integer)
                .collect()
        })
        .collect()
}

/// Fills pivot variables of `x` from the echelon rows; `rhs` holds the
/// integer right-hand side column when solving.
fn back_substitute(ech: &Echelon, x: &mut [Rational], rhs: Option<usize>) {
    for (k, row) in ech.rows.iter().enumerate().rev() {
        let p = ech.pivots[k];
        let mut s = match rhs {
            Some(col) => Rational::from_integer(row[col].clone()),
            None => Rational::zero(),
        };
        for j in p + 1..x.len() {
            if !row[j].is_zero() && !x[j].is_zero() {
                s -= &x[j] * Rational::from_integer(row[j].clone());
            }
        }
        x[p] = s / Rational::from_integer(row[p].clone());
    }
}

/// Solves `A x = b`. Free variables are set to zero; the result is checked
/// by multiplication before it is returned.
pub fn solve(a: &QMatrix, b: &[Rational]) -> Result<Solution> {
    if b.len() != a.rows {
        return Err(Error::DimensionMismatch { expected: a.rows, found: b.len() });
    }
    let n = a.cols;
    let ech = fraction_free_echelon(a.integer_rows(Some(b)), n + 1);
    if ech.pivots.last() == Some(&n) {
        return Err(Error::Inconsistent);
    }
    let mut x = vec![Rational::zero(); n];
    back_substitute(&ech, &mut x, Some(n));
    if a.mul_vec(&x)? != b {
        return Err(Error::Inconsistent);
    }
    Ok(Solution { unique: ech.pivots.len() == n, x })
}

/// Reduced row echelon basis of the row space (pivot entries equal to 1).
pub fn row_space_basis(a: &QMatrix) -> Vec<Vec<Rational>> {
    let ech = fraction_free_echelon(a.integer_rows(None), a.cols);
    let mut rows: Vec<Vec<Rational>> = ech
        .rows
        .iter()
        .zip(&ech.pivots)
        .map(|(row, &p)| {
            let inv = Rational::from_integer(row[p].clone()).recip();
            row.iter().map(|v| Rational::from_integer(v.clone()) * &inv).collect()
        })
        .collect();
    for k in (0..rows.len()).rev() {
        let p = ech.pivots[k];
        let (above, rest) = rows.split_at_mut(k);
        let pr = &rest[0];
        for row in above.iter_mut() {
            let f = row[p].clone();
            if f.is_zero() {
                continue;
            }
            for j in p..row.len() {
                if !pr[j].is_zero() {
                    let t = &f * &pr[j];
                    row[j] -= t;
                }
            }
        }
    }
    rows
}
