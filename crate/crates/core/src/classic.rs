//! Waring decomposition (`f = Σ αᵢ (x − aᵢ)^d`) and sparsest shift
//! (`f = Σ αᵢ (x − a)^eᵢ`) through a minimal SDE with shift 0.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, QMatrix};
use crate::poly::UniPoly;
use crate::rational::{self, Rational};
use crate::roots::{irrational_degree, rational_roots};
use crate::sde::{find_min_sde, power_solutions_lenient};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaringTerm {
    #[serde(with = "rational::serde_str")]
    pub coeff: Rational,
    #[serde(with = "rational::serde_str")]
    pub node: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum WaringResult {
    /// `f = Σ coeff · (x − node)^degree`, nodes ascending.
    Decomposed { degree: usize, terms: Vec<WaringTerm> },
    /// The Waring rank exceeds `√(2d/3)`.
    AboveThreshold,
}

impl WaringResult {
    pub fn rank(&self) -> Option<usize> {
        match self {
            WaringResult::Decomposed { terms, .. } => Some(terms.len()),
            WaringResult::AboveThreshold => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SparsestResult {
    /// `f = Σ coeffs[e] · (x − shift)^e`.
    Decomposed {
        #[serde(with = "rational::serde_str")]
        shift: Rational,
        #[serde(with = "sparse_map")]
        coeffs: BTreeMap<usize, Rational>,
    },
    /// Every shift needs more than `√d` terms.
    AboveThreshold,
}

impl SparsestResult {
    pub fn support(&self) -> Option<usize> {
        match self {
            SparsestResult::Decomposed { coeffs, .. } => Some(coeffs.len()),
            SparsestResult::AboveThreshold => None,
        }
    }
}

/// `None` for [`WaringResult::AboveThreshold`].
pub fn expand_waring(r: &WaringResult) -> Option<UniPoly> {
    match r {
        WaringResult::Decomposed { degree, terms } => Some(terms.iter().fold(UniPoly::zero(), |acc, t| {
            &acc + &UniPoly::affine_power(&t.node, *degree).scale(&t.coeff)
        })),
        WaringResult::AboveThreshold => None,
    }
}

/// `None` for [`SparsestResult::AboveThreshold`].
pub fn expand_sparsest(r: &SparsestResult) -> Option<UniPoly> {
    match r {
        SparsestResult::Decomposed { shift, coeffs } => {
            let len = coeffs.keys().next_back().map_or(0, |e| e + 1);
            let mut dense = vec![Rational::zero(); len];
            for (e, c) in coeffs {
                dense[*e] = c.clone();
            }
            Some(UniPoly::from_shifted(&dense, shift))
        }
        SparsestResult::AboveThreshold => None,
    }
}

fn degree_at_least_one(f: &UniPoly) -> Result<usize> {
    match f.degree() {
        None => Err(Error::ZeroPolynomial),
        Some(0) => Err(Error::ReconstructionFailed("constant input has no degree-d powers".into())),
        Some(d) => Ok(d),
    }
}

/// Decides whether the Waring rank is at most `√(2d/3)` and, if so,
/// returns the decomposition.
pub fn waring_decompose(f: &UniPoly) -> Result<WaringResult> {
    let d = degree_at_least_one(f)?;
    let s = find_min_sde(f, 0, d + 1)?;
    let k = s.order();
    if 3 * k * k > 2 * d {
        return Ok(WaringResult::AboveThreshold);
    }
    let (sols, irrational) = power_solutions_lenient(&s, d, d)?;
    if sols.len() < k {
        return if irrational { Err(Error::IrrationalNodeDetected) } else { Ok(WaringResult::AboveThreshold) };
    }
    let cols: Vec<Vec<Rational>> =
        sols.iter().map(|(b, _)| UniPoly::affine_power(b, d).into_coeffs()).collect();
    let sol = linalg::solve(&QMatrix::from_columns(d + 1, &cols), f.coeffs())
        .map_err(|_| Error::ReconstructionFailed("input is not in the span of the powers".into()))?;
    let terms: Vec<WaringTerm> = sols
        .into_iter()
        .zip(sol.x)
        .filter(|(_, c)| !c.is_zero())
        .map(|((node, _), coeff)| WaringTerm { coeff, node })
        .collect();
    let out = WaringResult::Decomposed { degree: d, terms };
    if expand_waring(&out).as_ref() != Some(f) {
        return Err(Error::ReconstructionFailed("expansion does not match the input".into()));
    }
    Ok(out)
}

/// Decides whether some shift gives at most `√d` terms and, if so, returns
/// the sparsest one (smallest shift on ties).
pub fn sparsest_shift(f: &UniPoly) -> Result<SparsestResult> {
    let d = degree_at_least_one(f)?;
    let s = find_min_sde(f, 0, d + 1)?;
    let k = s.order();
    // f satisfies an SDE of order equal to its sparsity
    if k * k > d {
        return Ok(SparsestResult::AboveThreshold);
    }
    let pk = s.leading();
    let roots = rational_roots(pk)?;
    let irrational = irrational_degree(pk, &roots) > 0;
    let best = roots
        .into_par_iter()
        .map(|(a, _)| {
            let g = f.taylor_shift(&a);
            (g.support_size(), a, g)
        })
        .min_by(|x, y| x.0.cmp(&y.0).then_with(|| x.1.cmp(&y.1)));
    let Some((_, shift, g)) = best.filter(|b| b.0 * b.0 <= d) else {
        return if irrational { Err(Error::IrrationalNodeDetected) } else { Ok(SparsestResult::AboveThreshold) };
    };
    let coeffs: BTreeMap<usize, Rational> = g
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(e, c)| (e, c.clone()))
        .collect();
    let out = SparsestResult::Decomposed { shift, coeffs };
    if expand_sparsest(&out).as_ref() != Some(f) {
        return Err(Error::ReconstructionFailed("expansion does not match the input".into()));
    }
    Ok(out)
}

/// Serializes exponent → coefficient maps as `{"e": "p/q"}`.
mod sparse_map {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serializer};

    use crate::rational::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(m: &BTreeMap<usize, Rational>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(m.iter().map(|(e, c)| (e.to_string(), format_rational(c))))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<usize, Rational>, D::Error> {
        let raw = BTreeMap::<String, String>::deserialize(d)?;
        raw.into_iter()
            .map(|(e, c)| {
                let e = e.parse().map_err(serde::de::Error::custom)?;
                let c = parse_rational(&c).map_err(serde::de::Error::custom)?;
                Ok((e, c))
            })
            .collect()
    }
}
