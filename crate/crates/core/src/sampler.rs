//! Binomial random uniform hypergraphs and perfect-matching threshold sweeps.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::Duration;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::{Edge, Hypergraph};
use crate::matching::{find_perfect_matching, MatchOutcome};
use crate::params::{ConstructionParams, Seed};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error("need 2 <= s <= n (got s = {s}, n = {n})")]
    BadShape { n: usize, s: usize },
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("C({n}, {s}) does not fit in 64 bits")]
    TooManyCandidates { n: usize, s: usize },
    #[error("sweep size {n} is not divisible by s = {s}")]
    NotDivisible { n: usize, s: usize },
    #[error("sweep needs at least one sample per point")]
    NoSamples,
    #[error("matching search exceeded its budget at n = {n}, p = {p}")]
    Inconclusive { n: usize, p: f64 },
}

/// Binomial coefficients `C(a, b)` for `a <= n`, `b <= s`, saturating at `u64::MAX`.
struct Binomials {
    s: usize,
    table: Vec<u64>,
}

impl Binomials {
    fn new(n: usize, s: usize) -> Self {
        let w = s + 1;
        let mut table = vec![0u64; (n + 1) * w];
        for a in 0..=n {
            table[a * w] = 1;
            for b in 1..=s.min(a) {
                let left = table[(a - 1) * w + b - 1];
                let right = if b < a { table[(a - 1) * w + b] } else { 0 };
                table[a * w + b] = left.saturating_add(right);
            }
        }
        Binomials { s, table }
    }

    fn get(&self, a: usize, b: usize) -> u64 {
        if b > a {
            0
        } else {
            self.table[a * (self.s + 1) + b]
        }
    }
}

/// The `rank`-th `s`-subset of `0..n` in lexicographic order.
fn unrank(binom: &Binomials, n: usize, s: usize, mut rank: u64) -> Edge {
    let mut out = Vec::with_capacity(s);
    let mut c = 0;
    for i in 0..s {
        loop {
            let with_c = binom.get(n - c - 1, s - i - 1);
            if rank < with_c {
                out.push(c);
                c += 1;
                break;
            }
            rank -= with_c;
            c += 1;
        }
    }
    out
}

/// Samples the binomial `s`-uniform hypergraph on `n` vertices: each of the
/// `C(n, s)` candidate edges is kept independently with probability `p`.
///
/// Candidates are visited in lexicographic rank order with geometric skips
/// `floor(ln U / ln(1 - p))`, `U` uniform on `(0, 1]`, so the running time is
/// proportional to the number of edges drawn rather than `C(n, s)`.
pub fn sample_hypergraph(n: usize, s: usize, p: f64, seed: Seed) -> Result<Hypergraph, SampleError> {
    if s < 2 || s > n {
        return Err(SampleError::BadShape { n, s });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(SampleError::BadProbability(p));
    }
    let binom = Binomials::new(n, s);
    let total = binom.get(n, s);
    if total == u64::MAX {
        return Err(SampleError::TooManyCandidates { n, s });
    }
    if p == 0.0 {
        return Ok(Hypergraph::empty(n));
    }
    if p == 1.0 {
        return Ok(Hypergraph::complete(n, s));
    }

    let mut rng = seed.rng();
    let log_keep = (-p).ln_1p();
    let mut edges = Vec::new();
    let mut rank = 0u64;
    loop {
        let u: f64 = 1.0 - rng.random::<f64>();
        let skip = (u.ln() / log_keep).floor();
        if skip >= (total - rank) as f64 {
            break;
        }
        rank += skip as u64;
        edges.push(unrank(&binom, n, s, rank));
        rank += 1;
        if rank >= total {
            break;
        }
    }
    Ok(Hypergraph::from_sorted_unchecked(n, edges))
}

/// Union of `rounds` independent samples at probability `p`; sample `i` uses
/// `seed.derive(i)`. Equivalent in law to one draw at `1 - (1 - p)^rounds`.
pub fn sample_union(
    n: usize,
    s: usize,
    p: f64,
    rounds: usize,
    seed: Seed,
) -> Result<Hypergraph, SampleError> {
    if s < 2 || s > n {
        return Err(SampleError::BadShape { n, s });
    }
    let mut all: BTreeSet<Edge> = BTreeSet::new();
    for i in 0..rounds {
        let h = sample_hypergraph(n, s, p, seed.derive(i as u64))?;
        all.extend(h.edges().iter().cloned());
    }
    Ok(Hypergraph::from_sorted_unchecked(n, all.into_iter().collect()))
}

/// The amplified sample: union of `params.l` rounds at `params.p`.
pub fn sample_amplified(
    n: usize,
    s: usize,
    params: &ConstructionParams,
    seed: Seed,
) -> Result<Hypergraph, SampleError> {
    sample_union(n, s, params.p, params.l, seed)
}

/// One row of a threshold sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n: usize,
    pub p: f64,
    pub samples: usize,
    pub successes: usize,
    pub fraction: f64,
}

/// Empirical probability that `H_s(n, p)` has a perfect matching, for every
/// `(n, p)` pair. Sample `j` at `(n, p_i)` uses
/// `seed.derive(n).derive(i).derive(j)`.
pub fn pm_threshold_sweep(
    s: usize,
    sizes: &[usize],
    probabilities: &[f64],
    samples: usize,
    seed: Seed,
    budget: Duration,
) -> Result<Vec<SweepPoint>, SampleError> {
    if samples == 0 {
        return Err(SampleError::NoSamples);
    }
    for &n in sizes {
        if s == 0 || n % s != 0 {
            return Err(SampleError::NotDivisible { n, s });
        }
        if s < 2 || s > n {
            return Err(SampleError::BadShape { n, s });
        }
    }
    if let Some(&p) = probabilities.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(SampleError::BadProbability(p));
    }

    let tasks: Vec<(usize, usize)> = sizes
        .iter()
        .flat_map(|&n| (0..probabilities.len()).map(move |i| (n, i)))
        .collect();
    tasks
        .par_iter()
        .map(|&(n, i)| {
            let p = probabilities[i];
            let point_seed = seed.derive(n as u64).derive(i as u64);
            let mut successes = 0;
            for j in 0..samples {
                let h = sample_hypergraph(n, s, p, point_seed.derive(j as u64))?;
                match find_perfect_matching(&h, budget).expect("sampled hypergraphs are uniform") {
                    MatchOutcome::Found(_) => successes += 1,
                    MatchOutcome::NoMatching => {}
                    MatchOutcome::BudgetExhausted => return Err(SampleError::Inconclusive { n, p }),
                }
            }
            Ok(SweepPoint {
                n,
                p,
                samples,
                successes,
                fraction: successes as f64 / samples as f64,
            })
        })
        .collect()
}

/// CSV with header `n,p,samples,successes,fraction`; floats use the shortest
/// representation that round-trips.
pub fn sweep_to_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from("n,p,samples,successes,fraction\n");
    for pt in points {
        writeln!(out, "{},{},{},{},{}", pt.n, pt.p, pt.samples, pt.successes, pt.fraction)
            .expect("writing to a String cannot fail");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    #[test]
    fn unrank_enumerates_lexicographically() {
        let binom = Binomials::new(7, 3);
        let expected: Vec<Edge> = (0..7).combinations(3).collect();
        let got: Vec<Edge> = (0..35).map(|r| unrank(&binom, 7, 3, r)).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn extreme_probabilities() {
        assert_eq!(sample_hypergraph(9, 3, 0.0, Seed(1)).unwrap().edge_count(), 0);
        let full = sample_hypergraph(9, 3, 1.0, Seed(1)).unwrap();
        assert_eq!(full.edge_count(), 84);
        assert_eq!(full, Hypergraph::complete(9, 3));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert_eq!(sample_hypergraph(3, 4, 0.5, Seed(0)), Err(SampleError::BadShape { n: 3, s: 4 }));
        assert_eq!(sample_hypergraph(5, 1, 0.5, Seed(0)), Err(SampleError::BadShape { n: 5, s: 1 }));
        assert!(matches!(sample_hypergraph(5, 2, 1.5, Seed(0)), Err(SampleError::BadProbability(_))));
        assert!(matches!(
            sample_hypergraph(1000, 40, 1e-9, Seed(0)),
            Err(SampleError::TooManyCandidates { .. })
        ));
    }

    #[test]
    fn same_seed_same_sample() {
        let a = sample_hypergraph(30, 4, 0.01, Seed(99)).unwrap();
        let b = sample_hypergraph(30, 4, 0.01, Seed(99)).unwrap();
        assert_eq!(serde_json::to_vec(&a).unwrap(), serde_json::to_vec(&b).unwrap());
        let c = sample_hypergraph(30, 4, 0.01, Seed(100)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn edge_count_is_binomial() {
        // mean 114, sd sqrt(114 * 0.9) ~ 10.13; the 100-sample mean has sd ~ 1.01
        let counts: Vec<usize> = (0..100)
            .map(|i| sample_hypergraph(20, 3, 0.1, Seed(5).derive(i)).unwrap().edge_count())
            .collect();
        let sd = (1140.0f64 * 0.1 * 0.9).sqrt();
        for &c in &counts {
            assert!((c as f64 - 114.0).abs() <= 4.0 * sd, "count {c}");
        }
        let mean = counts.iter().sum::<usize>() as f64 / 100.0;
        assert!((mean - 114.0).abs() <= 4.0 * sd / 10.0, "mean {mean}");
    }

    #[test]
    fn union_with_one_round_matches_single_draw() {
        for i in 0..20 {
            let seed = Seed(11).derive(i);
            let single = sample_hypergraph(12, 3, 0.2, seed.derive(0)).unwrap();
            assert_eq!(sample_union(12, 3, 0.2, 1, seed).unwrap(), single);
        }
        assert_eq!(sample_union(12, 3, 0.0, 9, Seed(3)).unwrap().edge_count(), 0);
    }

    #[test]
    fn amplified_density_matches_closed_form() {
        // q' = 1 - 0.99^8 = 0.0772553; C(13, 3) = 286 candidates per sample
        let q = 1.0 - 0.99f64.powi(8);
        let trials = 200.0 * 286.0;
        let total: usize = (0..200)
            .map(|i| sample_union(13, 3, 0.01, 8, Seed(21).derive(i)).unwrap().edge_count())
            .sum();
        let sd = (trials * q * (1.0 - q)).sqrt();
        assert!((total as f64 - trials * q).abs() <= 4.0 * sd, "total {total}");
    }

    #[test]
    fn union_bound_dominates_amplified_probability() {
        for li in 1..=40 {
            for pi in 0..=200 {
                let p = pi as f64 / 200.0;
                let l = li as f64;
                assert!(1.0 - (1.0 - p).powf(l) <= l * p + 1e-12);
            }
        }
    }

    #[test]
    fn sweep_endpoints_and_csv() {
        let pts = pm_threshold_sweep(3, &[6, 9], &[0.0, 1.0], 5, Seed(4), Duration::from_secs(5)).unwrap();
        let fractions: Vec<f64> = pts.iter().map(|p| p.fraction).collect();
        assert_eq!(fractions, vec![0.0, 1.0, 0.0, 1.0]);
        let csv = sweep_to_csv(&pts);
        assert!(csv.starts_with("n,p,samples,successes,fraction\n6,0,5,0,0\n6,1,5,5,1\n"));
        assert_eq!(
            pm_threshold_sweep(3, &[7], &[0.5], 5, Seed(4), Duration::from_secs(1)),
            Err(SampleError::NotDivisible { n: 7, s: 3 })
        );
    }
}
