//! Structural conditions on a decomposition, checked in exact integer
//! arithmetic. `n_e` is the number of terms with exponent at most `e`.

use serde::{Deserialize, Serialize};

use super::{expand, Decomposition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// `2 n_e ≤ ⌈(e+3)/2⌉` for all `e`: optimal over the reals.
    RealUniqueness,
    /// `n_e ≤ √((e+1)/2)` for all `e`: unique optimal decomposition.
    Uniqueness,
    /// Distinct nodes and `n_i ≤ (3i/4)^{1/3} − 1` for all `i ≥ 2`.
    DistinctNodes,
    /// `e_max < deg f + s²/2`.
    ExponentBound,
    /// Distinct nodes and every exponent `> 5s²/2`.
    BigExponents,
    /// Every exponent `> 5s²/2`, and terms sharing a node have exponents
    /// more than `5s²/2` apart.
    BigGaps,
    /// Terms grouped by node into `t` clusters whose exponents lie in
    /// `[e, e + δ]` with `e ≥ 5t²(δ+1)²/2`.
    SmallIntervals { delta: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub criterion: Criterion,
    pub passed: bool,
    /// Exponent at which the criterion first fails; `None` iff it passed.
    pub witness: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConditionReport {
    pub results: Vec<CriterionResult>,
}

impl ConditionReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn get(&self, c: Criterion) -> Option<&CriterionResult> {
        self.results.iter().find(|r| r.criterion == c)
    }
}

pub fn check_conditions(d: &Decomposition, criteria: &[Criterion]) -> ConditionReport {
    ConditionReport {
        results: criteria
            .iter()
            .map(|&c| {
                let witness = first_failure(d, c);
                CriterionResult { criterion: c, passed: witness.is_none(), witness }
            })
            .collect(),
    }
}

fn first_failure(d: &Decomposition, c: Criterion) -> Option<usize> {
    let mut exps: Vec<usize> = d.terms().iter().map(|t| t.exponent).collect();
    exps.sort_unstable();
    let e_max = exps.last().copied().unwrap_or(0);
    let n_at = |e: usize| exps.partition_point(|&x| x <= e) as u128;
    let s = exps.len() as u128;
    match c {
        Criterion::RealUniqueness => (0..=e_max).find(|&e| 2 * n_at(e) > (e as u128 + 4) / 2),
        Criterion::Uniqueness => (0..=e_max).find(|&e| 2 * n_at(e) * n_at(e) > e as u128 + 1),
        Criterion::DistinctNodes => {
            let gap = (2..=e_max.max(2)).find(|&i| {
                let n = n_at(i) + 1;
                4 * n * n * n > 3 * i as u128
            });
            min_opt(gap, repeated_node_exponent(d))
        }
        Criterion::ExponentBound => {
            let deg = expand(d).degree();
            match deg {
                Some(deg) if 2 * (e_max as u128) < 2 * deg as u128 + s * s => None,
                _ => Some(e_max),
            }
        }
        Criterion::BigExponents => {
            min_opt(small_exponent(&exps, 5 * s * s), repeated_node_exponent(d))
        }
        Criterion::BigGaps => {
            let bound = 5 * s * s;
            let mut gap = None;
            for (i, a) in d.terms().iter().enumerate() {
                for b in &d.terms()[i + 1..] {
                    if a.node == b.node && 2 * (a.exponent.abs_diff(b.exponent) as u128) <= bound {
                        gap = min_opt(gap, Some(a.exponent.min(b.exponent)));
                    }
                }
            }
            min_opt(small_exponent(&exps, bound), gap)
        }
        Criterion::SmallIntervals { delta } => {
            let mut clusters: Vec<(&num_rational::BigRational, usize, usize)> = Vec::new();
            for t in d.terms() {
                match clusters.iter_mut().find(|c| c.0 == &t.node) {
                    Some(c) => {
                        c.1 = c.1.min(t.exponent);
                        c.2 = c.2.max(t.exponent);
                    }
                    None => clusters.push((&t.node, t.exponent, t.exponent)),
                }
            }
            let t = clusters.len() as u128;
            let sq = (delta as u128 + 1) * (delta as u128 + 1);
            clusters
                .iter()
                .filter_map(|&(_, lo, hi)| {
                    if hi - lo > delta {
                        Some(hi)
                    } else if 2 * (lo as u128) < 5 * t * t * sq {
                        Some(lo)
                    } else {
                        None
                    }
                })
                .min()
        }
    }
}

/// Smallest exponent `e` with `2e ≤ bound`.
fn small_exponent(sorted: &[usize], bound: u128) -> Option<usize> {
    sorted.first().copied().filter(|&e| 2 * e as u128 <= bound)
}

fn repeated_node_exponent(d: &Decomposition) -> Option<usize> {
    let ts = d.terms();
    let mut out = None;
    for (i, a) in ts.iter().enumerate() {
        for b in &ts[i + 1..] {
            if a.node == b.node {
                out = min_opt(out, Some(a.exponent.min(b.exponent)));
            }
        }
    }
    out
}

fn min_opt(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::AffineTerm;
    use crate::rational::int;

    fn dec(ts: &[(i64, i64, usize)]) -> Decomposition {
        Decomposition::new(ts.iter().map(|&(c, a, e)| AffineTerm::new(int(c), int(a), e)))
    }

    const ALL: [Criterion; 7] = [
        Criterion::RealUniqueness,
        Criterion::Uniqueness,
        Criterion::DistinctNodes,
        Criterion::ExponentBound,
        Criterion::BigExponents,
        Criterion::BigGaps,
        Criterion::SmallIntervals { delta: 0 },
    ];

    #[test]
    fn distinct_nodes_boundary_passes() {
        let r = check_conditions(&dec(&[(1, -1, 36), (-36, 0, 35)]), &[Criterion::DistinctNodes]);
        assert!(r.all_passed());
        let r = check_conditions(&dec(&[(1, -1, 35), (-35, 0, 34)]), &[Criterion::DistinctNodes]);
        assert_eq!(r.results[0].witness, Some(35));
    }

    #[test]
    fn uniqueness_fails_with_witness() {
        let r = check_conditions(&dec(&[(1, 0, 3), (1, 1, 3)]), &[Criterion::Uniqueness]);
        assert!(!r.results[0].passed);
        assert_eq!(r.results[0].witness, Some(3));
    }

    #[test]
    fn single_large_term_passes_everything() {
        let r = check_conditions(&dec(&[(1, 2, 40)]), &ALL);
        assert!(r.all_passed(), "{r:?}");
        assert!(r.results.iter().all(|x| x.witness.is_none()));
    }

    #[test]
    fn regime_criteria() {
        let gaps = dec(&[(1, 1, 25), (1, 1, 11)]);
        let r = check_conditions(&gaps, &[Criterion::BigGaps, Criterion::BigExponents]);
        assert!(r.get(Criterion::BigGaps).unwrap().passed);
        assert_eq!(r.get(Criterion::BigExponents).unwrap().witness, Some(11));
        let close = dec(&[(1, 1, 25), (1, 1, 20)]);
        assert_eq!(check_conditions(&close, &[Criterion::BigGaps]).results[0].witness, Some(20));

        let si = dec(&[(2, 1, 13), (3, 1, 12)]);
        assert!(check_conditions(&si, &[Criterion::SmallIntervals { delta: 1 }]).all_passed());
        let r = check_conditions(&si, &[Criterion::SmallIntervals { delta: 0 }]);
        assert_eq!(r.results[0].witness, Some(13));
        let low = dec(&[(1, 1, 9), (1, 1, 10)]);
        let r = check_conditions(&low, &[Criterion::SmallIntervals { delta: 1 }]);
        assert_eq!(r.results[0].witness, Some(9));
    }

    #[test]
    fn real_uniqueness_and_exponent_bound() {
        // 2 n_e <= ceil((e+3)/2): three terms of exponent 2 fail at e = 2
        let r = check_conditions(&dec(&[(1, 0, 2), (1, 1, 2), (1, 2, 2)]), &[Criterion::RealUniqueness]);
        assert_eq!(r.results[0].witness, Some(2));
        // (x+1)^2 - (x-1)^2 = 4x: e_max = 2 is not < 1 + 2
        let r = check_conditions(&dec(&[(1, -1, 2), (-1, 1, 2)]), &[Criterion::ExponentBound]);
        assert!(r.all_passed());
        // x − (x − 1) − 1 expands to zero
        let r = check_conditions(&dec(&[(1, 0, 1), (-1, 1, 1), (-1, 0, 0)]), &[Criterion::ExponentBound]);
        assert_eq!(r.results[0].witness, Some(1));
    }
}
