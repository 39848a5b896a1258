//! The reconstruction algorithms. Each one is total: it returns a verified
//! decomposition or a typed error.

use num_traits::Zero;
use rayon::prelude::*;

use super::{verified, AffineTerm, Decomposition};
use crate::linalg::{self, QMatrix};
use crate::poly::UniPoly;
use crate::rational::{self, Rational};
use crate::roots::{irrational_degree, rational_roots};
use crate::sde::{find_min_sde, power_solutions_lenient, shifted_solution_coords};
use crate::{Error, Result};

/// Upper end of the δ search in auto mode.
pub const DEFAULT_MAX_DELTA: usize = 4;

/// Degree bound on the polynomial factors `R` in the small-intervals model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delta {
    Fixed(usize),
    /// Try `δ = 0, 1, …, max` until one verifies.
    Auto { max: usize },
}

fn ceil_half(n: usize) -> usize {
    n.div_ceil(2)
}

/// Failure that becomes `IrrationalNodeDetected` when irrational nodes were
/// seen along the way, since they are the likely cause.
fn failure(irrational: bool, msg: &str) -> Error {
    if irrational {
        Error::IrrationalNodeDetected
    } else {
        Error::ReconstructionFailed(msg.to_string())
    }
}

fn blame(irrational: bool) -> impl Fn(Error) -> Error {
    move |e| if irrational { Error::IrrationalNodeDetected } else { e }
}

fn constant_decomposition(f: &UniPoly) -> Decomposition {
    Decomposition::new([AffineTerm::new(f.coeff(0), Rational::zero(), 0)])
}

/// Coordinates of `target` in `basis`; the basis must be independent and
/// span `target`.
fn solve_unique(target: &UniPoly, basis: &[UniPoly]) -> Result<Vec<Rational>> {
    let rows = basis
        .iter()
        .chain(std::iter::once(target))
        .map(|p| p.coeffs().len())
        .max()
        .unwrap_or(0)
        .max(1);
    let cols: Vec<Vec<Rational>> = basis.iter().map(|p| p.coeffs().to_vec()).collect();
    let mut b = target.coeffs().to_vec();
    b.resize(rows, Rational::zero());
    match linalg::solve(&QMatrix::from_columns(rows, &cols), &b) {
        Ok(s) if s.unique => Ok(s.x),
        Ok(_) => Err(Error::ReconstructionFailed("candidate basis is linearly dependent".into())),
        Err(Error::Inconsistent) => {
            Err(Error::ReconstructionFailed("input is not in the span of the candidates".into()))
        }
        Err(e) => Err(e),
    }
}

/// Minimal SDE(r, 0), its power solutions with
/// `(r+1)²/2 ≤ e ≤ deg f + r²/2`, and the unique expansion of `f` in them.
fn power_basis_pipeline(f: &UniPoly) -> Result<Decomposition> {
    let Some(d) = f.degree() else {
        return Err(Error::ZeroPolynomial);
    };
    if d == 0 {
        return Ok(constant_decomposition(f));
    }
    let s = find_min_sde(f, 0, d + 1)?;
    let r = s.order();
    let (sols, irrational) = power_solutions_lenient(&s, ceil_half((r + 1) * (r + 1)), d + r * r / 2)?;
    if sols.is_empty() {
        return Err(failure(irrational, "no power solutions in range"));
    }
    let basis: Vec<UniPoly> = sols.iter().map(|(b, e)| UniPoly::affine_power(b, *e)).collect();
    let coeffs = solve_unique(f, &basis).map_err(blame(irrational))?;
    let terms = sols
        .into_iter()
        .zip(coeffs)
        .filter(|(_, c)| !c.is_zero())
        .map(|((b, e), c)| AffineTerm::new(c, b, e))
        .collect();
    verified(f, terms).map_err(blame(irrational))
}

/// Distinct nodes with every exponent above `5s²/2`. Outputs with a repeated
/// node are rejected; those belong to [`decompose_big_gaps`].
pub fn decompose_big_exponents(f: &UniPoly) -> Result<Decomposition> {
    let d = power_basis_pipeline(f)?;
    if d.has_repeated_nodes() {
        return Err(Error::ReconstructionFailed("repeated node in a big-exponent decomposition".into()));
    }
    Ok(d)
}

/// Same pipeline as big exponents; repeated nodes are allowed when their
/// exponents are far apart.
pub fn decompose_big_gaps(f: &UniPoly) -> Result<Decomposition> {
    power_basis_pipeline(f)
}

pub fn decompose_distinct_nodes(f: &UniPoly) -> Result<Decomposition> {
    decompose_distinct_nodes_with_stats(f).map(|(d, _)| d)
}

/// Distinct-nodes reconstruction, peeling off the highest terms of the
/// residual at each pass. Also returns, per pass, the largest coefficient
/// bit size among the recovered terms and the new residual.
pub fn decompose_distinct_nodes_with_stats(f: &UniPoly) -> Result<(Decomposition, Vec<u64>)> {
    let deg = f.degree().ok_or(Error::ZeroPolynomial)?;
    let mut h = f.clone();
    let mut terms = Vec::new();
    let mut stats = Vec::new();
    let mut irrational = false;
    let cap = 2 * deg + 4;
    for _ in 0..cap {
        let Some(dh) = h.degree() else {
            return verified(f, terms).map(|d| (d, stats));
        };
        if dh == 0 {
            stats.push(h.max_bit_size());
            terms.extend(constant_decomposition(&h).terms().iter().cloned());
            return verified(f, terms).map(|d| (d, stats));
        }
        let s = find_min_sde(&h, 0, dh + 1)?;
        let t = s.order();
        let (mut sols, irr) =
            power_solutions_lenient(&s, ceil_half((t + 1) * (t + 1)), dh + (dh + 2) * (dh + 2) / 8)?;
        irrational |= irr;
        sols.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

        // doubled d_{i+1} (0-based i), with the sentinel (t+1)²/2 past the end
        let twice = |i: usize| -> i128 {
            sols.get(i).map_or(((t + 1) * (t + 1)) as i128, |(_, e)| 2 * *e as i128)
        };
        let r = (1..=sols.len()).find(|&r| {
            2 * sols[r - 1].1 as i128 - twice(r) > (r * r) as i128 && twice(r) < 2 * dh as i128
        });
        let Some(r) = r else {
            return Err(failure(irrational, "no exponent gap found"));
        };
        let j = sols[r - 1].1 - r * r / 2;
        let top = &sols[..r];
        let basis: Vec<UniPoly> = top.iter().map(|(b, e)| UniPoly::affine_power(b, e - j)).collect();
        let gamma = solve_unique(&h.derivative(j), &basis)
            .map_err(blame(irrational))?;
        let recovered: Vec<AffineTerm> = top
            .iter()
            .zip(gamma)
            .filter(|(_, g)| !g.is_zero())
            .map(|((b, e), g)| {
                let beta = g / Rational::from_integer(rational::falling_factorial(*e, j));
                AffineTerm::new(beta, b.clone(), *e)
            })
            .collect();
        if recovered.is_empty() {
            return Err(failure(irrational, "no progress on the residual"));
        }
        let tilde = recovered.iter().fold(UniPoly::zero(), |acc, t| &acc + &t.expand());
        h = &h - &tilde;
        let term_bits = recovered
            .iter()
            .map(|t| rational::bit_size(&t.coeff).max(rational::bit_size(&t.node)))
            .max()
            .unwrap_or(0);
        stats.push(term_bits.max(h.max_bit_size()));
        terms.extend(recovered);
    }
    Err(failure(irrational, "iteration limit reached"))
}

pub fn decompose_small_intervals(f: &UniPoly, delta: Delta) -> Result<Decomposition> {
    match delta {
        Delta::Fixed(d) => small_intervals_at(f, d),
        Delta::Auto { max } => (0..=max)
            .find_map(|d| small_intervals_at(f, d).ok())
            .ok_or(Error::DeltaExhausted { max_delta: max }),
    }
}

fn small_intervals_at(f: &UniPoly, delta: usize) -> Result<Decomposition> {
    let Some(d) = f.degree() else {
        return Err(Error::ZeroPolynomial);
    };
    if d == 0 {
        return Ok(constant_decomposition(f));
    }
    let s = find_min_sde(f, delta, d + 1)?;
    let r = s.order();
    let roots = rational_roots(s.leading())?;
    let irrational = irrational_degree(s.leading(), &roots) > 0;
    let sq = (delta + 1) * (delta + 1);
    // strict bounds (r+1)²(δ+1)²/2 < e < d + r²(δ+1)²/2
    let lo = (r + 1) * (r + 1) * sq / 2 + 1;
    let hi = (d + ceil_half(r * r * sq)).saturating_sub(1);
    let per_root: Vec<(Rational, Vec<Vec<Rational>>)> = roots
        .into_par_iter()
        .map(|(c, _)| {
            let coords = shifted_solution_coords(&s, &c, delta, lo, hi);
            (c, coords)
        })
        .collect();
    let basis: Vec<UniPoly> = per_root
        .iter()
        .flat_map(|(c, vs)| vs.iter().map(move |v| UniPoly::from_shifted(v, c)))
        .collect();
    if basis.is_empty() {
        return Err(failure(irrational, "no shifted solutions in range"));
    }
    let lambda = solve_unique(f, &basis).map_err(blame(irrational))?;
    let mut lambda = lambda.into_iter();
    let mut terms = Vec::new();
    for (c, vs) in &per_root {
        let width = vs.first().map_or(0, Vec::len);
        let mut comp = vec![Rational::zero(); width];
        for v in vs {
            let l = lambda.next().expect("one coefficient per basis vector");
            if l.is_zero() {
                continue;
            }
            for (acc, x) in comp.iter_mut().zip(v) {
                if !x.is_zero() {
                    *acc += &l * x;
                }
            }
        }
        for (e, coef) in comp.into_iter().enumerate() {
            if !coef.is_zero() {
                terms.push(AffineTerm::new(coef, c.clone(), e));
            }
        }
    }
    verified(f, terms).map_err(blame(irrational))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::expand;
    use crate::rational::int;

    fn t(c: i64, a: i64, e: usize) -> AffineTerm {
        AffineTerm::new(int(c), int(a), e)
    }

    fn planted(ts: &[AffineTerm]) -> (UniPoly, Decomposition) {
        let d = Decomposition::new(ts.iter().cloned());
        (expand(&d), d)
    }

    #[test]
    fn big_exponents_examples() {
        let (f, d) = planted(&[t(1, 1, 13), t(2, -2, 11)]);
        assert_eq!(decompose_big_exponents(&f).unwrap(), d);
        let (f, d) = planted(&[t(1, 5, 20)]);
        assert_eq!(decompose_big_exponents(&f).unwrap(), d);
    }

    #[test]
    fn distinct_nodes_examples() {
        let (f, d) = planted(&[t(1, -1, 36), t(-36, 0, 35)]);
        assert_eq!(decompose_distinct_nodes(&f).unwrap(), d);
        let (f, d) = planted(&[t(1, 4, 9)]);
        assert_eq!(decompose_distinct_nodes(&f).unwrap(), d);
    }

    #[test]
    fn small_intervals_examples() {
        let (f, d) = planted(&[t(2, 1, 13), t(3, 1, 12)]);
        assert_eq!(decompose_small_intervals(&f, Delta::Fixed(1)).unwrap(), d);
        let (f, d) = planted(&[t(1, -7, 11)]);
        assert_eq!(decompose_small_intervals(&f, Delta::Fixed(0)).unwrap(), d);
    }

    #[test]
    fn small_intervals_auto_finds_delta() {
        // t = 2, δ = 1 needs exponents >= 40
        let (f, d) = planted(&[t(1, 1, 41), t(1, 1, 40), t(1, -1, 40)]);
        assert_eq!(decompose_small_intervals(&f, Delta::Auto { max: 3 }).unwrap(), d);
    }

    #[test]
    fn small_intervals_best_effort_instance() {
        // below the guaranteed regime; admitted only through verification
        let (f, d) = planted(&[t(1, 1, 22), t(1, 1, 21), t(1, -1, 20)]);
        if let Ok(got) = decompose_small_intervals(&f, Delta::Auto { max: 3 }) {
            assert_eq!(got, d);
        }
    }

    #[test]
    fn big_gaps_examples() {
        let (f, d) = planted(&[t(1, 1, 25), t(1, 1, 11)]);
        assert_eq!(decompose_big_gaps(&f).unwrap(), d);
        let (f, d) = planted(&[t(1, 0, 30)]);
        assert_eq!(decompose_big_gaps(&f).unwrap(), d);
        // s = 3 needs every exponent and same-node gap above 22.5
        let (f, d) = planted(&[t(1, 1, 60), t(4, -3, 25), t(1, 1, 30)]);
        assert_eq!(decompose_big_gaps(&f).unwrap(), d);
        // exponent 12 is below that bound: only a verified answer is acceptable
        let (f, d) = planted(&[t(1, 1, 60), t(4, -3, 25), t(1, 1, 12)]);
        if let Ok(got) = decompose_big_gaps(&f) {
            assert_eq!(got, d);
        }
    }

    #[test]
    fn repeated_nodes_rejected_by_big_exponents() {
        let (f, _) = planted(&[t(1, 1, 25), t(1, 1, 11)]);
        assert!(matches!(decompose_big_exponents(&f), Err(Error::ReconstructionFailed(_))));
    }

    #[test]
    fn constants() {
        let f = UniPoly::from_ints(&[7]);
        let d = Decomposition::new([t(7, 0, 0)]);
        assert_eq!(decompose_big_exponents(&f).unwrap(), d);
        assert_eq!(decompose_distinct_nodes(&f).unwrap(), d);
        assert_eq!(decompose_small_intervals(&f, Delta::Fixed(0)).unwrap(), d);
        assert_eq!(decompose_big_exponents(&UniPoly::zero()), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn stats_have_one_entry_per_pass() {
        let (f, _) = planted(&[t(1, -1, 36), t(-36, 0, 35)]);
        let (_, stats) = decompose_distinct_nodes_with_stats(&f).unwrap();
        assert_eq!(stats.len(), 2);
        assert!(stats.iter().all(|&b| b > 0));
    }
}
