//! Planted instances in each algorithm's regime, certified by
//! [`check_conditions`] before they are returned.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decompose::{check_conditions, expand, AffineTerm, Criterion, Decomposition};
use crate::poly::UniPoly;
use crate::rational::int;
use crate::{Error, Result};

const ATTEMPTS: usize = 1000;
const COEFF_RANGE: i64 = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentProfile {
    pub min: usize,
    pub max: usize,
    /// Minimum difference between consecutive sorted exponents.
    pub min_gap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub s: usize,
    pub exponent_profile: ExponentProfile,
    /// Nodes are integers in `[-node_range, node_range]`.
    pub node_range: i64,
    pub repeated_nodes: bool,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(s: usize, seed: u64) -> Self {
        InstanceSpec {
            s,
            exponent_profile: ExponentProfile { min: 0, max: 200, min_gap: 0 },
            node_range: 9,
            repeated_nodes: false,
            seed,
        }
    }

    pub fn with_exponents(mut self, min: usize, max: usize, min_gap: usize) -> Self {
        self.exponent_profile = ExponentProfile { min, max, min_gap };
        self
    }

    pub fn with_node_range(mut self, r: i64) -> Self {
        self.node_range = r;
        self
    }

    pub fn with_repeated_nodes(mut self, yes: bool) -> Self {
        self.repeated_nodes = yes;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    BigExponents,
    DistinctNodes,
    SmallIntervals { delta: usize },
    BigGaps,
}

impl Regime {
    pub fn criterion(self) -> Criterion {
        match self {
            Regime::BigExponents => Criterion::BigExponents,
            Regime::DistinctNodes => Criterion::DistinctNodes,
            Regime::SmallIntervals { delta } => Criterion::SmallIntervals { delta },
            Regime::BigGaps => Criterion::BigGaps,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::BigExponents => write!(f, "big-exp"),
            Regime::DistinctNodes => write!(f, "distinct-nodes"),
            Regime::SmallIntervals { delta } => write!(f, "small-intervals:{delta}"),
            Regime::BigGaps => write!(f, "big-gaps"),
        }
    }
}

impl FromStr for Regime {
    type Err = Error;

    /// Accepts `big-exp`, `distinct-nodes`, `big-gaps` and
    /// `small-intervals[:δ]` (δ defaults to 0).
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "big-exp" | "big_exponents" => Ok(Regime::BigExponents),
            "distinct-nodes" | "distinct_nodes" => Ok(Regime::DistinctNodes),
            "big-gaps" | "big_gaps" => Ok(Regime::BigGaps),
            _ => {
                let rest = s
                    .strip_prefix("small-intervals")
                    .or_else(|| s.strip_prefix("small_intervals"))
                    .ok_or_else(|| Error::Parse(format!("unknown regime {s:?}")))?;
                let delta = match rest.strip_prefix(':') {
                    Some(d) => d.parse().map_err(|_| Error::Parse(format!("bad delta in {s:?}")))?,
                    None if rest.is_empty() => 0,
                    None => return Err(Error::Parse(format!("unknown regime {s:?}"))),
                };
                Ok(Regime::SmallIntervals { delta })
            }
        }
    }
}

/// A planted polynomial together with the decomposition it was built from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub regime: Regime,
    pub poly: UniPoly,
    pub truth: Decomposition,
}

fn unsat(msg: impl Into<String>) -> Error {
    Error::UnsatisfiableSpec(msg.into())
}

/// Smallest exponent above `5s²/2`.
fn big_exponent_floor(s: usize) -> usize {
    5 * s * s / 2 + 1
}

/// Increasing (non-decreasing when `gap = 0`) sequence with
/// `out[k] ≥ lower[k]`, consecutive differences `≥ gap`, all `≤ max`.
fn sample_sequence<R: Rng>(rng: &mut R, lower: &[usize], gap: usize, max: usize) -> Option<Vec<usize>> {
    let n = lower.len();
    let mut greedy = Vec::with_capacity(n);
    for (k, &l) in lower.iter().enumerate() {
        greedy.push(if k == 0 { l } else { l.max(greedy[k - 1] + gap) });
    }
    if greedy.last().is_some_and(|&x| x > max) {
        return None;
    }
    let mut out: Vec<usize> = Vec::with_capacity(n);
    for (k, &l) in lower.iter().enumerate() {
        let lo = if k == 0 { l } else { l.max(out[k - 1] + gap) };
        let hi = max - (n - 1 - k) * gap;
        // spread the slack evenly so later slots stay reachable
        let span = (hi - lo) / (n - k);
        out.push(lo + rng.gen_range(0..=span));
    }
    Some(out)
}

fn nonzero_coeff<R: Rng>(rng: &mut R) -> i64 {
    let c = rng.gen_range(1..=COEFF_RANGE);
    if rng.gen_bool(0.5) {
        -c
    } else {
        c
    }
}

fn distinct_nodes<R: Rng>(rng: &mut R, count: usize, range: i64) -> Result<Vec<i64>> {
    let pool: Vec<i64> = (-range..=range).collect();
    if pool.len() < count {
        return Err(unsat(format!("{count} distinct nodes do not fit in [-{range}, {range}]")));
    }
    Ok(pool.choose_multiple(rng, count).copied().collect())
}

/// Splits `s` items into `t` nonempty groups of size at most `cap`.
fn group_sizes<R: Rng>(rng: &mut R, s: usize, t: usize, cap: usize) -> Vec<usize> {
    let mut sizes = vec![1; t];
    for _ in t..s {
        let open: Vec<usize> = (0..t).filter(|&i| sizes[i] < cap).collect();
        sizes[*open.choose(rng).expect("capacity checked")] += 1;
    }
    sizes
}

/// `(node, exponent)` pairs for one draw; `None` to redraw.
fn draw<R: Rng>(rng: &mut R, spec: &InstanceSpec, regime: Regime) -> Result<Option<Vec<(i64, usize)>>> {
    let s = spec.s;
    let p = spec.exponent_profile;
    match regime {
        Regime::BigExponents | Regime::DistinctNodes => {
            if spec.repeated_nodes {
                return Err(unsat("the regime requires distinct nodes"));
            }
            let lower: Vec<usize> = (1..=s)
                .map(|k| match regime {
                    Regime::BigExponents => big_exponent_floor(s),
                    // n_e = k needs 4(k+1)³ ≤ 3e
                    _ => (4 * (k + 1).pow(3)).div_ceil(3),
                }
                .max(p.min))
                .collect();
            let Some(mut exps) = sample_sequence(rng, &lower, p.min_gap, p.max) else {
                return Err(unsat(format!("exponents in [{}, {}] cannot meet the regime bound", p.min, p.max)));
            };
            exps.shuffle(rng);
            let nodes = distinct_nodes(rng, s, spec.node_range)?;
            Ok(Some(nodes.into_iter().zip(exps).collect()))
        }
        Regime::BigGaps => {
            if spec.repeated_nodes && s < 2 {
                return Err(unsat("repeated nodes need at least two terms"));
            }
            let t = if spec.repeated_nodes { rng.gen_range(1..s) } else { s };
            let sizes = group_sizes(rng, s, t, s);
            let nodes = distinct_nodes(rng, t, spec.node_range)?;
            let floor = big_exponent_floor(s).max(p.min);
            let mut out = Vec::with_capacity(s);
            for (node, m) in nodes.into_iter().zip(sizes) {
                let gap = big_exponent_floor(s).max(p.min_gap);
                let Some(exps) = sample_sequence(rng, &vec![floor; m], gap, p.max) else {
                    return Err(unsat(format!("{m} exponents with gaps above 5s²/2 do not fit below {}", p.max)));
                };
                out.extend(exps.into_iter().map(|e| (node, e)));
            }
            Ok(Some(out))
        }
        Regime::SmallIntervals { delta } => {
            let cap = delta + 1;
            let t_min = s.div_ceil(cap);
            let t_max = if spec.repeated_nodes { s - 1 } else { s };
            if t_min > t_max {
                return Err(unsat("clusters of width delta cannot hold repeated nodes"));
            }
            let cluster_floor = |t: usize| (5 * t * t * cap * cap).div_ceil(2).max(p.min);
            if cluster_floor(t_min) > p.max {
                return Err(unsat(format!("cluster bases must be at least {}", cluster_floor(t_min))));
            }
            let t = if spec.repeated_nodes { rng.gen_range(t_min..=t_max) } else { s };
            let floor = cluster_floor(t);
            if floor > p.max {
                return Ok(None);
            }
            let sizes = group_sizes(rng, s, t, cap);
            let nodes = distinct_nodes(rng, t, spec.node_range)?;
            let mut out = Vec::with_capacity(s);
            for (node, m) in nodes.into_iter().zip(sizes) {
                let top = p.max.saturating_sub(delta).max(floor);
                let base = rng.gen_range(floor..=top);
                let mut offsets: Vec<usize> = (1..=delta).filter(|&o| base + o <= p.max).collect();
                if offsets.len() + 1 < m {
                    return Ok(None);
                }
                offsets.shuffle(rng);
                out.push((node, base));
                out.extend(offsets[..m - 1].iter().map(|&o| (node, base + o)));
            }
            Ok(Some(out))
        }
    }
}

fn gaps_ok(pairs: &[(i64, usize)], p: &ExponentProfile) -> bool {
    let mut e: Vec<usize> = pairs.iter().map(|x| x.1).collect();
    e.sort_unstable();
    e.first().is_some_and(|&x| x >= p.min)
        && e.last().is_some_and(|&x| x <= p.max)
        && e.windows(2).all(|w| w[1] - w[0] >= p.min_gap)
}

/// Draws a planted instance for `regime` under `spec`. The result always
/// passes the regime's criterion, has exactly `spec.s` terms, and (when
/// `repeated_nodes` is set) shares at least one node between two terms.
pub fn generate(spec: &InstanceSpec, regime: Regime) -> Result<Instance> {
    let p = spec.exponent_profile;
    if spec.s == 0 {
        return Err(unsat("s must be at least 1"));
    }
    if p.min > p.max {
        return Err(unsat(format!("exponent min {} exceeds max {}", p.min, p.max)));
    }
    if spec.node_range < 1 {
        return Err(unsat("node range must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for _ in 0..ATTEMPTS {
        let Some(pairs) = draw(&mut rng, spec, regime)? else { continue };
        if !gaps_ok(&pairs, &p) {
            continue;
        }
        let terms: Vec<AffineTerm> = pairs
            .iter()
            .map(|&(a, e)| AffineTerm::new(int(nonzero_coeff(&mut rng)), int(a), e))
            .collect();
        let truth = Decomposition::new(terms);
        if truth.len() != spec.s || spec.repeated_nodes != truth.has_repeated_nodes() {
            continue;
        }
        if !check_conditions(&truth, &[regime.criterion()]).all_passed() {
            continue;
        }
        let poly = expand(&truth);
        if poly.degree().is_none() {
            continue;
        }
        return Ok(Instance { regime, poly, truth });
    }
    Err(unsat(format!("no certified {regime} instance found in {ATTEMPTS} draws")))
}
