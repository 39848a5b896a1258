//! Univariate decompositions `f = Σ αᵢ (x − aᵢ)^eᵢ`.

mod build;
mod conditions;

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::poly::UniPoly;
use crate::rational::{self, Rational};
use crate::{Error, Result};

pub use build::{
    decompose_big_exponents, decompose_big_gaps, decompose_distinct_nodes,
    decompose_distinct_nodes_with_stats, decompose_small_intervals, Delta, DEFAULT_MAX_DELTA,
};
pub use conditions::{check_conditions, ConditionReport, Criterion, CriterionResult};

/// One term `coeff · (x − node)^exponent`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineTerm {
    #[serde(with = "rational::serde_str")]
    pub coeff: Rational,
    #[serde(with = "rational::serde_str")]
    pub node: Rational,
    pub exponent: usize,
}

impl AffineTerm {
    pub fn new(coeff: Rational, node: Rational, exponent: usize) -> Self {
        AffineTerm { coeff, node, exponent }
    }

    pub fn expand(&self) -> UniPoly {
        UniPoly::affine_power(&self.node, self.exponent).scale(&self.coeff)
    }
}

impl fmt::Display for AffineTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = rational::format_rational(&self.coeff);
        let base = if self.node.is_zero() {
            "x".to_string()
        } else if self.node.is_negative() {
            format!("(x + {})", rational::format_rational(&-&self.node))
        } else {
            format!("(x - {})", rational::format_rational(&self.node))
        };
        write!(f, "{c} * {base}^{}", self.exponent)
    }
}

/// Terms sorted by exponent descending, then node ascending, with no
/// repeated `(node, exponent)` pair and no zero coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Decomposition {
    terms: Vec<AffineTerm>,
}

impl Decomposition {
    /// Canonicalizes: merges equal `(node, exponent)` pairs, drops zero
    /// coefficients, and moves exponent-0 terms to node 0.
    pub fn new(terms: impl IntoIterator<Item = AffineTerm>) -> Self {
        let mut terms: Vec<AffineTerm> = terms
            .into_iter()
            .map(|mut t| {
                if t.exponent == 0 {
                    t.node = Rational::zero();
                }
                t
            })
            .collect();
        terms.sort_by(|a, b| b.exponent.cmp(&a.exponent).then_with(|| a.node.cmp(&b.node)));
        let mut merged: Vec<AffineTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.exponent == t.exponent && last.node == t.node => {
                    last.coeff += t.coeff;
                }
                _ => merged.push(t),
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        Decomposition { terms: merged }
    }

    pub fn terms(&self) -> &[AffineTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn expand(&self) -> UniPoly {
        expand(self)
    }

    /// True when two terms share a node.
    pub fn has_repeated_nodes(&self) -> bool {
        let mut nodes: Vec<&Rational> = self.terms.iter().map(|t| &t.node).collect();
        nodes.sort();
        nodes.windows(2).any(|w| w[0] == w[1])
    }
}

impl fmt::Display for Decomposition {
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
struct DecompositionJson {
    terms: Vec<AffineTerm>,
}

impl<'de> Deserialize<'de> for Decomposition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = DecompositionJson::deserialize(d)?;
        if j.terms.iter().any(|t| t.coeff.is_zero()) {
            return Err(serde::de::Error::custom("term with zero coefficient"));
        }
        Ok(Decomposition::new(j.terms))
    }
}

/// Dense expansion of a decomposition.
pub fn expand(d: &Decomposition) -> UniPoly {
    d.terms.iter().fold(UniPoly::zero(), |acc, t| &acc + &t.expand())
}

/// Returns the decomposition only if it re-expands to `f` exactly.
pub(crate) fn verified(f: &UniPoly, terms: Vec<AffineTerm>) -> Result<Decomposition> {
    let d = Decomposition::new(terms);
    if &expand(&d) != f {
        return Err(Error::ReconstructionFailed("expansion does not match the input".into()));
    }
    Ok(d)
}

/// Which algorithm produced a decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmTag {
    BigExponents,
    BigGaps,
    DistinctNodes,
    SmallIntervals,
}

impl AlgorithmTag {
    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmTag::BigExponents => "big_exponents",
            AlgorithmTag::BigGaps => "big_gaps",
            AlgorithmTag::DistinctNodes => "distinct_nodes",
            AlgorithmTag::SmallIntervals => "small_intervals",
        }
    }
}

impl fmt::Display for AlgorithmTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Runs `tag`'s algorithm on `f` (auto-δ for small intervals).
pub fn decompose_with(f: &UniPoly, tag: AlgorithmTag) -> Result<Decomposition> {
    match tag {
        AlgorithmTag::BigExponents => decompose_big_exponents(f),
        AlgorithmTag::BigGaps => decompose_big_gaps(f),
        AlgorithmTag::DistinctNodes => decompose_distinct_nodes(f),
        AlgorithmTag::SmallIntervals => {
            decompose_small_intervals(f, Delta::Auto { max: DEFAULT_MAX_DELTA })
        }
    }
}

/// Tries big exponents, big gaps, distinct nodes and small intervals in that
/// order and returns the first verified result.
pub fn decompose_auto(f: &UniPoly) -> Result<(Decomposition, AlgorithmTag)> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut irrational = false;
    for tag in [
        AlgorithmTag::BigExponents,
        AlgorithmTag::BigGaps,
        AlgorithmTag::DistinctNodes,
        AlgorithmTag::SmallIntervals,
    ] {
        match decompose_with(f, tag) {
            Ok(d) => return Ok((d, tag)),
            Err(Error::IrrationalNodeDetected) => irrational = true,
            Err(_) => {}
        }
    }
    if irrational {
        Err(Error::IrrationalNodeDetected)
    } else {
        Err(Error::ReconstructionFailed("no algorithm produced a verified decomposition".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn t(c: i64, a: i64, e: usize) -> AffineTerm {
        AffineTerm::new(int(c), int(a), e)
    }

    #[test]
    fn expand_examples() {
        assert_eq!(expand(&Decomposition::new([t(1, 0, 3)])), UniPoly::from_ints(&[0, 0, 0, 1]));
        assert!(expand(&Decomposition::default()).is_zero());
        let d = Decomposition::new([t(1, -1, 2), t(-1, 1, 2)]);
        assert_eq!(expand(&d), UniPoly::from_ints(&[0, 4]));
    }

    #[test]
    fn canonical_order_and_merge() {
        let d = Decomposition::new([t(1, 2, 3), t(2, -1, 3), t(1, 0, 5), t(3, 2, 3), t(4, 7, 0)]);
        assert_eq!(d.terms(), &[t(1, 0, 5), t(2, -1, 3), t(4, 2, 3), t(4, 0, 0)]);
        assert!(Decomposition::new([t(1, 1, 2), t(-1, 1, 2)]).is_empty());
    }

    #[test]
    fn json_form() {
        let d = Decomposition::new([t(-36, 0, 35), t(1, -1, 36)]);
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(
            s,
            r#"{"terms":[{"coeff":"1","node":"-1","exponent":36},{"coeff":"-36","node":"0","exponent":35}]}"#
        );
        assert_eq!(serde_json::from_str::<Decomposition>(&s).unwrap(), d);
        assert!(serde_json::from_str::<Decomposition>(
            r#"{"terms":[{"coeff":"0","node":"1","exponent":2}]}"#
        )
        .is_err());
    }

    #[test]
    fn auto_examples() {
        let (d, tag) = decompose_auto(&UniPoly::affine_power(&int(2), 7)).unwrap();
        assert_eq!(d.terms(), &[t(1, 2, 7)]);
        assert_eq!(tag, AlgorithmTag::BigExponents);
        let f = expand(&Decomposition::new([t(1, 1, 25), t(1, 1, 11)]));
        let (d, tag) = decompose_auto(&f).unwrap();
        assert_eq!(d.terms(), &[t(1, 1, 25), t(1, 1, 11)]);
        assert_eq!(tag, AlgorithmTag::BigGaps);
    }

    #[test]
    fn auto_on_small_quadratic() {
        // x^2 + x = (x + 1/2)^2 - 1/4 lies outside every regime; no algorithm
        // finds a verified answer and the dispatcher says so
        let f = UniPoly::from_ints(&[0, 1, 1]);
        assert!(matches!(decompose_auto(&f), Err(Error::ReconstructionFailed(_))));
    }
}
