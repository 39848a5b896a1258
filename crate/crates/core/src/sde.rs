//! Wronskians and shifted differential equations `Σ Pᵢ(x) g⁽ⁱ⁾ = 0` with
//! `deg Pᵢ ≤ i + l`.

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, QMatrix};
use crate::poly::UniPoly;
use crate::rational::{self, Rational};
use crate::roots::{irrational_degree, rational_roots};
use crate::{Error, Result};

/// A shifted differential equation of order `k = coeffs.len() - 1` and
/// shift `l`, stored in primitive integer form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Sde {
    order: usize,
    shift: usize,
    coeffs: Vec<UniPoly>,
}

impl Sde {
    /// Validates degrees and rescales to the canonical form: integer
    /// coefficients with content 1, the first nonzero one (in `(i, j)`
    /// order) positive.
    pub fn new(shift: usize, coeffs: Vec<UniPoly>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().all(UniPoly::is_zero) {
            return Err(Error::ZeroPolynomial);
        }
        for (i, p) in coeffs.iter().enumerate() {
            if let Some(d) = p.degree() {
                if d > i + shift {
                    return Err(Error::DimensionMismatch { expected: i + shift, found: d });
                }
            }
        }
        let flat: Vec<Rational> = coeffs
            .iter()
            .enumerate()
            .flat_map(|(i, p)| (0..=i + shift).map(move |j| p.coeff(j)))
            .collect();
        let prim = rational::primitive_integer_vector(&flat);
        let mut it = prim.into_iter().map(Rational::from_integer);
        let coeffs: Vec<UniPoly> = (0..coeffs.len())
            .map(|i| UniPoly::new(it.by_ref().take(i + shift + 1).collect()))
            .collect();
        Ok(Sde { order: coeffs.len() - 1, shift, coeffs })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn coeffs(&self) -> &[UniPoly] {
        &self.coeffs
    }

    /// Leading coefficient polynomial `P_k`.
    pub fn leading(&self) -> &UniPoly {
        &self.coeffs[self.order]
    }

    /// The same equation viewed at a higher order (zero coefficients added).
    pub fn padded(&self, order: usize) -> Sde {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order.max(self.order) + 1, UniPoly::zero());
        Sde { order: coeffs.len() - 1, shift: self.shift, coeffs }
    }
}

#[derive(Deserialize)]
struct SdeJson {
    order: usize,
    shift: usize,
    coeffs: Vec<UniPoly>,
}

impl<'de> Deserialize<'de> for Sde {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SdeJson::deserialize(d)?;
        if j.coeffs.len() != j.order + 1 {
            return Err(serde::de::Error::custom("order does not match coefficient count"));
        }
        Sde::new(j.shift, j.coeffs).map_err(serde::de::Error::custom)
    }
}

/// Determinant of the matrix `(f_j^{(i)})`, by fraction-free elimination
/// over `ℚ[x]`.
pub fn wronskian(fs: &[UniPoly]) -> UniPoly {
    let n = fs.len();
    if n == 0 {
        return UniPoly::one();
    }
    let mut m: Vec<Vec<UniPoly>> = (0..n)
        .map(|i| fs.iter().map(|f| f.derivative(i)).collect())
        .collect();
    let mut prev = UniPoly::one();
    let mut negate = false;
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return UniPoly::zero();
        };
        if p != k {
            m.swap(p, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.div_rem(&prev).expect("nonzero pivot").0;
            }
        }
        prev = m[k][k].clone();
    }
    if negate {
        -&prev
    } else {
        prev
    }
}

/// `Σ Pᵢ · f⁽ⁱ⁾`; zero exactly when `f` satisfies `s`.
pub fn apply_sde(s: &Sde, f: &UniPoly) -> UniPoly {
    s.coeffs
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .fold(UniPoly::zero(), |acc, (i, p)| &acc + &(p * &f.derivative(i)))
}

/// An SDE of exactly order `k` and shift `l` satisfied by `f`, if one
/// exists. Unknowns are the coefficients of `x^j f⁽ⁱ⁾`, `0 ≤ j ≤ i + l`.
pub fn find_sde_of_order(f: &UniPoly, k: usize, l: usize) -> Result<Option<Sde>> {
    let d = f.degree().ok_or(Error::ZeroPolynomial)?;
    let mut columns = Vec::new();
    for i in 0..=k {
        let fi = f.derivative(i);
        for j in 0..=i + l {
            columns.push(fi.shift_up(j).into_coeffs());
        }
    }
    let a = QMatrix::from_columns(d + l + 1, &columns);
    let Some(v) = linalg::kernel(&a).into_iter().next() else {
        return Ok(None);
    };
    let mut it = v.into_iter();
    let coeffs = (0..=k)
        .map(|i| UniPoly::new(it.by_ref().take(i + l + 1).collect()))
        .collect();
    Sde::new(l, coeffs).map(Some)
}

/// The minimal-order SDE with shift `l` satisfied by `f`, searching orders
/// `1..=max_order`.
pub fn find_min_sde(f: &UniPoly, l: usize, max_order: usize) -> Result<Sde> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    for k in 1..=max_order {
        if let Some(s) = find_sde_of_order(f, k, l)? {
            return Ok(s);
        }
    }
    Err(Error::NotFound { shift: l, max_order })
}

/// `Q[i][m] = Pᵢ⁽ᵐ⁾ / m!`, so that `Pᵢ(y + b) = Σₘ Q[i][m](b) yᵐ`.
fn taylor_coefficient_polys(s: &Sde) -> Vec<Vec<UniPoly>> {
    s.coeffs
        .iter()
        .map(|p| {
            let len = p.coeffs().len();
            (0..len)
                .map(|m| {
                    UniPoly::new(
                        (0..len - m)
                            .map(|n| {
                                Rational::from_integer(rational::binomial(n + m, m)) * p.coeff(n + m)
                            })
                            .collect(),
                    )
                })
                .collect()
        })
        .collect()
}

/// Polynomial in `b` whose roots are the nodes with `(x − b)^e` solving `s`,
/// or `None` when it vanishes identically.
fn node_polynomial(s: &Sde, q: &[Vec<UniPoly>], e: usize) -> Option<UniPoly> {
    let k = s.order;
    let falling: Vec<Rational> = (0..=k)
        .map(|i| Rational::from_integer(rational::falling_factorial(e, i)))
        .collect();
    // coefficient of y^(e-k+t) has b-degree <= k+l-t: start from the cheap end
    let mut g = UniPoly::zero();
    for t in (0..=k + s.shift).rev() {
        let mut c = UniPoly::zero();
        for i in 0..=k {
            if falling[i].is_zero() || t + i < k {
                continue;
            }
            if let Some(qm) = q[i].get(t + i - k) {
                c = &c + &qm.scale(&falling[i]);
            }
        }
        g = g.gcd(&c);
        if g.degree() == Some(0) {
            return Some(g);
        }
    }
    (!g.is_zero()).then_some(g)
}

/// Rational `(b, e)` pairs plus a flag set when irrational nodes were seen.
pub(crate) type PowerSolutions = (Vec<(Rational, usize)>, bool);

/// Like [`power_solutions`], but reports irrational nodes through the flag
/// instead of failing, so callers can still try the rational ones.
pub(crate) fn power_solutions_lenient(s: &Sde, e_min: usize, e_max: usize) -> Result<PowerSolutions> {
    let q = taylor_coefficient_polys(s);
    let per_e: Vec<Result<PowerSolutions>> = (e_min.max(1)..=e_max)
        .into_par_iter()
        .map(|e| {
            let g = node_polynomial(s, &q, e).ok_or(Error::UnboundedSolutions { exponent: e })?;
            if g.degree() == Some(0) {
                return Ok((Vec::new(), false));
            }
            let roots = rational_roots(&g)?;
            let irrational = irrational_degree(&g.monic(), &roots) > 0;
            let found = roots
                .into_iter()
                .filter(|(b, _)| apply_sde(s, &UniPoly::affine_power(b, e)).is_zero())
                .map(|(b, _)| (b, e))
                .collect();
            Ok((found, irrational))
        })
        .collect();
    let mut out = Vec::new();
    let mut irrational = false;
    for r in per_e {
        let (v, irr) = r?;
        out.extend(v);
        irrational |= irr;
    }
    Ok((out, irrational))
}

/// All `(b, e)` with `b ∈ ℚ`, `e_min ≤ e ≤ e_max` and `(x − b)^e` solving
/// `s`, sorted by `(e, b)`.
pub fn power_solutions(s: &Sde, e_min: usize, e_max: usize) -> Result<Vec<(Rational, usize)>> {
    let (v, irrational) = power_solutions_lenient(s, e_min, e_max)?;
    if irrational {
        return Err(Error::IrrationalNodeDetected);
    }
    Ok(v)
}

/// Coordinates of `apply_sde(s, (x − c)^E)` in powers of `y = x − c`, given
/// `shifted[i] = Pᵢ(y + c)`.
fn apply_to_shifted_power(shifted: &[UniPoly], big_e: usize, len: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); len];
    for (i, p) in shifted.iter().enumerate() {
        if i > big_e || p.is_zero() {
            continue;
        }
        let f = Rational::from_integer(rational::falling_factorial(big_e, i));
        for (n, c) in p.coeffs().iter().enumerate() {
            if !c.is_zero() {
                v[big_e - i + n] += &f * c;
            }
        }
    }
    v
}

/// A basis of the span of all solutions `R(x)(x − c)^e` of `s` with
/// `deg R ≤ delta` and `e_min ≤ e ≤ e_max`, in reduced echelon form with
/// respect to the basis `(x − c)^j`.
pub fn shifted_poly_solutions(
    s: &Sde,
    c: &Rational,
    delta: usize,
    e_min: usize,
    e_max: usize,
) -> Result<Vec<UniPoly>> {
    Ok(shifted_solution_coords(s, c, delta, e_min, e_max)
        .into_iter()
        .map(|v| UniPoly::from_shifted(&v, c))
        .collect())
}

/// Same as [`shifted_poly_solutions`] but left in `(x − c)^j` coordinates.
pub(crate) fn shifted_solution_coords(
    s: &Sde,
    c: &Rational,
    delta: usize,
    e_min: usize,
    e_max: usize,
) -> Vec<Vec<Rational>> {
    let e_min = e_min.max(1);
    if e_min > e_max {
        return Vec::new();
    }
    let shifted: Vec<UniPoly> = s.coeffs.iter().map(|p| p.taylor_shift(c)).collect();
    let width = e_max + delta + 1;
    let rows = e_max + delta + s.shift + 1;
    let found: Vec<Vec<Vec<Rational>>> = (e_min..=e_max)
        .into_par_iter()
        .map(|e| {
            let cols: Vec<Vec<Rational>> =
                (0..=delta).map(|m| apply_to_shifted_power(&shifted, e + m, rows)).collect();
            linalg::kernel(&QMatrix::from_columns(rows, &cols))
                .into_iter()
                .map(|r| {
                    let mut v = vec![Rational::zero(); width];
                    for (m, x) in r.into_iter().enumerate() {
                        v[e + m] = x;
                    }
                    v
                })
                .collect()
        })
        .collect();
    let all: Vec<Vec<Rational>> = found.into_iter().flatten().collect();
    if all.is_empty() {
        return Vec::new();
    }
    linalg::row_space_basis(&QMatrix::from_rows(all).expect("equal widths"))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> UniPoly {
        UniPoly::from_ints(c)
    }

    fn pow(a: i64, e: usize) -> UniPoly {
        UniPoly::affine_power(&int(a), e)
    }

    #[test]
    fn wronskian_examples() {
        assert_eq!(wronskian(&[UniPoly::one(), UniPoly::x()]), UniPoly::one());
        let f = p(&[1, 2, 3]);
        assert!(wronskian(&[f.clone(), f]).is_zero());
        // 3 x^2 (x-1)^2
        let expect = (&UniPoly::monomial(int(3), 2)) * &pow(1, 2);
        assert_eq!(wronskian(&[pow(0, 3), pow(1, 3)]), expect);
    }

    #[test]
    fn wronskian_needs_row_swap() {
        // first column vanishes after the top entry: x and x^2 - 1 and 1
        let w = wronskian(&[UniPoly::one(), UniPoly::x(), p(&[0, 0, 1])]);
        assert_eq!(w, p(&[2]));
        let w = wronskian(&[p(&[0, 0, 1]), UniPoly::x(), UniPoly::one()]);
        assert_eq!(w, p(&[-2]));
    }

    #[test]
    fn apply_examples() {
        let s = Sde::new(0, vec![p(&[-5]), p(&[-2, 1])]).unwrap();
        assert!(apply_sde(&s, &pow(2, 5)).is_zero());
        assert!(apply_sde(&s, &UniPoly::zero()).is_zero());
        let r = apply_sde(&s, &pow(3, 5));
        // canonical sign flips the equation: 5(x-3)^5 − (x-2)·5(x-3)^4
        assert_eq!(r, pow(3, 4).scale(&int(-5)));
    }

    #[test]
    fn single_power_has_order_one() {
        let s = find_min_sde(&pow(2, 5), 0, 6).unwrap();
        assert_eq!(s.order(), 1);
        assert_eq!(s.coeffs(), &[p(&[5]), p(&[2, -1])]);
        assert!(apply_sde(&s, &pow(2, 5)).is_zero());
    }

    #[test]
    fn two_powers_fit_in_order_three() {
        let f = &pow(1, 13) + &pow(-2, 11).scale(&int(2));
        let s = find_min_sde(&f, 0, 3).unwrap();
        assert!(s.order() <= 3);
        assert!(apply_sde(&s, &f).is_zero());
        let sols = power_solutions(&s, 5, 20).unwrap();
        assert!(sols.contains(&(int(1), 13)));
        assert!(sols.contains(&(int(-2), 11)));
    }

    #[test]
    fn generic_polynomial_has_no_order_one_sde() {
        let f = p(&[3, -1, 4, 1, -5, 9, 2, -6, 5]);
        assert_eq!(find_min_sde(&f, 0, 1), Err(Error::NotFound { shift: 0, max_order: 1 }));
    }

    #[test]
    fn power_solutions_single_power() {
        let s = find_min_sde(&pow(2, 5), 0, 6).unwrap();
        assert_eq!(power_solutions(&s, 1, 10).unwrap(), vec![(int(2), 5)]);
    }

    #[test]
    fn irrational_nodes_are_detected() {
        let f = sqrt2_pair(13);
        let s = find_min_sde(&f, 0, 3).unwrap();
        assert_eq!(power_solutions(&s, 1, 20), Err(Error::IrrationalNodeDetected));
    }

    /// `(x − √2)^e + (x + √2)^e`, which has rational coefficients.
    fn sqrt2_pair(e: usize) -> UniPoly {
        let c = (0..=e)
            .map(|k| {
                let j = e - k;
                if j % 2 == 1 {
                    return int(0);
                }
                Rational::from_integer(rational::binomial(e, k) * BigInt::from(2).pow(j as u32 / 2) * 2)
            })
            .collect();
        UniPoly::new(c)
    }

    #[test]
    fn shifted_solutions_span_repeated_node() {
        let f = &pow(1, 13).scale(&int(2)) + &pow(1, 12).scale(&int(3));
        // the minimal order-2 space is not one-dimensional; the found equation
        // still has f among its shifted solutions
        let found = find_min_sde(&f, 0, 4).unwrap();
        assert_eq!(found.order(), 2);
        let sols = shifted_poly_solutions(&found, &int(1), 1, 10, 15).unwrap();
        let m = QMatrix::from_columns(14, &[sols[0].clone().into_coeffs(), f.clone().into_coeffs()]);
        assert_eq!(sols.len(), 1);
        assert_eq!(linalg::rank(&m), 1);

        // (x-1)^2 g'' - 24 (x-1) g' + 156 g annihilates exactly (x-1)^12 and (x-1)^13
        let s = Sde::new(0, vec![p(&[156]), p(&[24, -24]), p(&[1, -2, 1])]).unwrap();
        let basis = shifted_poly_solutions(&s, &int(1), 1, 10, 15).unwrap();
        assert_eq!(basis.len(), 2);
        let m = QMatrix::from_columns(
            14,
            &[basis[0].clone().into_coeffs(), basis[1].clone().into_coeffs(), pow(1, 12).into_coeffs()],
        );
        assert_eq!(linalg::rank(&m), 2);
        let m = QMatrix::from_columns(
            14,
            &[basis[0].clone().into_coeffs(), basis[1].clone().into_coeffs(), pow(1, 13).into_coeffs()],
        );
        assert_eq!(linalg::rank(&m), 2);
        for b in &basis {
            assert!(apply_sde(&s, b).is_zero());
        }
        assert!(shifted_poly_solutions(&s, &int(1), 1, 15, 10).unwrap().is_empty());
        assert!(shifted_poly_solutions(&s, &int(5), 1, 10, 15).unwrap().is_empty());
    }

    #[test]
    fn json_round_trip() {
        let s = find_min_sde(&pow(2, 5), 0, 6).unwrap();
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"order":1,"shift":0,"coeffs":[{"coeffs":["5"]},{"coeffs":["2","-1"]}]}"#);
        assert_eq!(serde_json::from_str::<Sde>(&j).unwrap(), s);
    }

    fn small_poly(max_deg: usize) -> impl Strategy<Value = UniPoly> {
        prop::collection::vec(-4i64..=4, 0..=max_deg + 1).prop_map(|v| UniPoly::from_ints(&v))
    }

    fn coefficient_rank(fs: &[UniPoly]) -> usize {
        let rows = fs.iter().map(|f| f.coeffs().len()).max().unwrap_or(0).max(1);
        let cols: Vec<Vec<Rational>> = fs.iter().map(|f| f.coeffs().to_vec()).collect();
        linalg::rank(&QMatrix::from_columns(rows, &cols))
    }

    proptest! {
        #[test]
        fn wronskian_detects_dependence(fs in prop::collection::vec(small_poly(6), 1..=4)) {
            let w = wronskian(&fs);
            prop_assert_eq!(w.is_zero(), coefficient_rank(&fs) < fs.len());
        }

        #[test]
        fn multiplicity_bound(fs in prop::collection::vec(small_poly(6), 1..=4), a in -3i64..=3) {
            prop_assume!(coefficient_rank(&fs) == fs.len());
            let sum = fs.iter().fold(UniPoly::zero(), |acc, f| &acc + f);
            prop_assume!(!sum.is_zero());
            let a = int(a);
            let w = wronskian(&fs);
            prop_assert!(sum.mult_at(&a).unwrap() <= fs.len() - 1 + w.mult_at(&a).unwrap());
        }

        #[test]
        fn found_sde_annihilates(f in small_poly(8), l in 0usize..=2) {
            prop_assume!(!f.is_zero());
            let d = f.degree().unwrap();
            let s = find_min_sde(&f, l, d + 1).unwrap();
            prop_assert!(apply_sde(&s, &f).is_zero());
            prop_assert_eq!(&find_min_sde(&f, l, d + 1).unwrap(), &s);
            for k in s.order()..=s.order() + 2 {
                prop_assert!(find_sde_of_order(&f, k, l).unwrap().is_some());
                prop_assert!(apply_sde(&s.padded(k), &f).is_zero());
            }
        }

        #[test]
        fn order_bound_for_planted_sums(
            terms in prop::collection::vec((-4i64..=4, -3i64..=3, 6usize..=14, prop::collection::vec(-3i64..=3, 1..=2)), 1..=3),
            delta in 0usize..=1,
        ) {
            let mut nodes: Vec<i64> = terms.iter().map(|t| t.1).collect();
            nodes.sort();
            nodes.dedup();
            prop_assume!(nodes.len() == terms.len());
            let f = terms.iter().fold(UniPoly::zero(), |acc, (_, a, e, q)| {
                let q = UniPoly::from_ints(&q[..q.len().min(delta + 1)]);
                &acc + &(&q * &pow(*a, *e))
            });
            prop_assume!(!f.is_zero());
            let t = terms.len();
            let s = find_min_sde(&f, delta, 2 * t - 1).unwrap();
            prop_assert!(apply_sde(&s, &f).is_zero());
        }

        #[test]
        fn power_solutions_are_solutions(f in small_poly(7)) {
            prop_assume!(f.degree().unwrap_or(0) >= 1);
            let s = find_min_sde(&f, 0, f.degree().unwrap() + 1).unwrap();
            if let Ok((sols, _)) = power_solutions_lenient(&s, s.order().max(1), 12) {
                for (b, e) in sols {
                    prop_assert!(apply_sde(&s, &UniPoly::affine_power(&b, e)).is_zero());
                }
            }
        }
    }
}
