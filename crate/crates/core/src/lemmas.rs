//! Executable checks of the structural facts behind the construction, each
//! paired with an exhaustive or randomized suite.

use std::time::Duration;

use itertools::Itertools;
use rand::seq::IndexedRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::{Edge, Graph, Hypergraph, Vertex};
use crate::matching::{find_perfect_matching, MatchOutcome, DEFAULT_MATCH_BUDGET};
use crate::params::Seed;
use crate::sparsity::{brute_force_sparsity, check_sparsity, is_minimal_violator, Violator, DEFAULT_BRUTE_FORCE_CAP};
use crate::subsets::{min_subset_edges, SubsetEdgeCount};

pub const DEFAULT_ENUMERATION_CAP: u128 = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LemmaError {
    #[error("2-section is disconnected")]
    Disconnected,
    #[error("enumeration needs {needed} items, cap is {cap}")]
    CapExceeded { needed: u128, cap: u128 },
    #[error("hypergraph is not {0}-uniform")]
    WrongUniformity(usize),
    #[error("hypothesis not met: edges {:?} span only {} vertices", .0.edges, .0.spanned)]
    HypothesisNotMet(Violator),
    #[error("need at least 4 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("the full vertex set is a hyperedge")]
    FullEdge,
    #[error("density hypothesis fails")]
    DensityFails,
    #[error("no valid cut found: {0}")]
    Counterexample(String),
}

/// `|V| <= 1 + sum(|e| - 1)` for a hypergraph with connected 2-section.
pub fn connected_bound_check(h: &Hypergraph) -> Result<bool, LemmaError> {
    if !h.two_section().is_connected() {
        return Err(LemmaError::Disconnected);
    }
    let budget: usize = h.edges().iter().map(|e| e.len() - 1).sum();
    Ok(h.n() <= 1 + budget)
}

/// Exhaustively checks `|union F| >= sum over F of (|e| - 1)` for every
/// nonempty edge set `F`.
pub fn density_hypothesis_check(h: &Hypergraph, cap: u128) -> Result<bool, LemmaError> {
    let e = h.edge_count();
    let needed = 1u128.checked_shl(e as u32).unwrap_or(u128::MAX);
    if e >= 127 || needed > cap {
        return Err(LemmaError::CapExceeded { needed, cap });
    }
    let mut seen = vec![0u64; h.n()];
    for (stamp, mask) in (1u64..1 << e).enumerate() {
        let stamp = stamp as u64 + 1;
        let mut union = 0usize;
        let mut weight = 0usize;
        for (i, edge) in h.edges().iter().enumerate() {
            if mask >> i & 1 == 1 {
                weight += edge.len() - 1;
                for &v in edge {
                    if seen[v] != stamp {
                        seen[v] = stamp;
                        union += 1;
                    }
                }
            }
        }
        if union < weight {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `W` separates the vertex set into nonempty `side_a` and `side_b` with no
/// 2-section edge between them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutWitness {
    pub w: Vec<Vertex>,
    pub side_a: Vec<Vertex>,
    pub side_b: Vec<Vertex>,
}

/// Sides from the components of `G - W`: the first component, then the rest.
fn cut_from_components(g: &Graph, w: &[Vertex]) -> Option<CutWitness> {
    let (rest, map) = g.delete_vertices(w).expect("cut vertices are in range");
    let comps = rest.components();
    if comps.len() < 2 {
        return None;
    }
    let side_a: Vec<Vertex> = comps[0].iter().map(|&v| map.to_old(v)).collect();
    let mut side_b: Vec<Vertex> = comps[1..].iter().flatten().map(|&v| map.to_old(v)).collect();
    side_b.sort_unstable();
    Some(CutWitness { w: w.to_vec(), side_a, side_b })
}

/// A set of at most two vertices whose removal disconnects the 2-section,
/// for hypergraphs on at least four vertices without the full vertex set as
/// an edge and satisfying the density hypothesis.
///
/// If some edge `e0` has at least three vertices, take the first such edge and
/// the smallest `v` outside it, let `C` be the component of `v` in the
/// 2-section of `H` without `e0`, and cut at `W = e0 ∩ C` with sides `C - W`
/// and `V - C`. Otherwise `H` is a graph: a vertex of degree one is cut off by
/// its neighbor, and the remaining case is a cycle, cut at the
/// lexicographically smallest disconnecting pair.
pub fn find_small_cut(h: &Hypergraph) -> Result<CutWitness, LemmaError> {
    let n = h.n();
    if n < 4 {
        return Err(LemmaError::TooFewVertices(n));
    }
    if h.edges().iter().any(|e| e.len() == n) {
        return Err(LemmaError::FullEdge);
    }
    if !density_hypothesis_check(h, DEFAULT_BRUTE_FORCE_CAP)? {
        return Err(LemmaError::DensityFails);
    }
    let g = h.two_section();
    if let Some(cut) = cut_from_components(&g, &[]) {
        return Ok(cut);
    }

    let cut = if let Some(e0) = h.edges().iter().position(|e| e.len() >= 3) {
        large_edge_cut(h, e0)?
    } else {
        graph_cut(&g)?
    };
    if !validate_cut(h, &cut) {
        return Err(LemmaError::Counterexample(format!("witness {cut:?} does not disconnect")));
    }
    Ok(cut)
}

fn large_edge_cut(h: &Hypergraph, e0: usize) -> Result<CutWitness, LemmaError> {
    let edge = &h.edges()[e0];
    let v = (0..h.n()).find(|x| edge.binary_search(x).is_err()).expect("e0 is not the full vertex set");
    let comps = h.without_edge(e0).two_section().components();
    let c = comps.into_iter().find(|c| c.binary_search(&v).is_ok()).expect("v lies in a component");
    let w: Vec<Vertex> = edge.iter().copied().filter(|x| c.binary_search(x).is_ok()).collect();
    if w.len() > 2 {
        return Err(LemmaError::Counterexample(format!("e0 meets the component of {v} in {w:?}")));
    }
    let side_a: Vec<Vertex> = c.iter().copied().filter(|x| w.binary_search(x).is_err()).collect();
    let side_b: Vec<Vertex> = (0..h.n()).filter(|x| c.binary_search(x).is_err()).collect();
    if side_a.is_empty() || side_b.is_empty() {
        return Err(LemmaError::Counterexample(format!("empty side for W = {w:?}")));
    }
    Ok(CutWitness { w, side_a, side_b })
}

fn graph_cut(g: &Graph) -> Result<CutWitness, LemmaError> {
    if let Some(u) = (0..g.n()).find(|&u| g.degree(u) == 1) {
        let w = vec![g.neighbors(u)[0]];
        let side_b: Vec<Vertex> = (0..g.n()).filter(|&x| x != u && x != w[0]).collect();
        return Ok(CutWitness { w, side_a: vec![u], side_b });
    }
    (0..g.n())
        .tuple_combinations()
        .find_map(|(a, b)| cut_from_components(g, &[a, b]))
        .ok_or_else(|| LemmaError::Counterexample("no disconnecting pair".to_string()))
}

/// Recomputes a cut's validity from scratch.
pub fn validate_cut(h: &Hypergraph, cut: &CutWitness) -> bool {
    let n = h.n();
    let mut owner = vec![0u8; n];
    for (tag, part) in [(1u8, &cut.w), (2, &cut.side_a), (3, &cut.side_b)] {
        for &v in part.iter() {
            if v >= n || owner[v] != 0 {
                return false;
            }
            owner[v] = tag;
        }
    }
    cut.w.len() <= 2
        && !cut.side_a.is_empty()
        && !cut.side_b.is_empty()
        && owner.iter().all(|&t| t != 0)
        && h.two_section().edges().all(|(u, v)| owner[u] + owner[v] != 5)
}

/// Densest `(s+1)`-set of the 2-section.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeBound {
    pub holds: bool,
    pub bound: usize,
    pub worst: SubsetEdgeCount,
}

/// Every `(s+1)`-set spans at most `C(s,2) + 2` edges of the 2-section,
/// provided every set of fewer than `2^(s+1)` edges of the `s`-uniform `H`
/// spans at least `(s-1)|F|` vertices. An unmet hypothesis is an error.
pub fn edge_bound_check(h: &Hypergraph, s: usize) -> Result<EdgeBound, LemmaError> {
    if !h.is_uniform(s) || s < 3 {
        return Err(LemmaError::WrongUniformity(s));
    }
    let window = (1usize << (s + 1)) - 1;
    let verdict = check_sparsity(h, window, s).map_err(|_| LemmaError::WrongUniformity(s))?;
    if let Some(v) = verdict.violator {
        return Err(LemmaError::HypothesisNotMet(v));
    }
    let t = s + 1;
    let bound = s * (s - 1) / 2 + 2;
    let pairs = t * (t - 1) / 2;
    // the densest set of the 2-section is the sparsest set of its complement
    let sparsest = min_subset_edges(&h.two_section().complement(), t)
        .map_err(|_| LemmaError::TooFewVertices(h.n()))?;
    let worst = SubsetEdgeCount { count: pairs - sparsest.count, witness: sparsest.witness };
    Ok(EdgeBound { holds: worst.count <= bound, bound, worst })
}

/// Every edge of the given sizes on `n` vertices, in lexicographic order.
fn candidate_edges(n: usize, sizes: &[usize]) -> Vec<Edge> {
    let mut all: Vec<Edge> = sizes
        .iter()
        .filter(|&&k| k >= 1 && k <= n)
        .flat_map(|&k| (0..n).combinations(k))
        .collect();
    all.sort_unstable();
    all.dedup();
    all
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// All labelled hypergraphs on `n` vertices with at most `max_edges` edges
/// drawn from the given sizes, by edge count and then lexicographically.
pub fn enumerate_hypergraphs(
    n: usize,
    max_edges: usize,
    sizes: &[usize],
    cap: u128,
) -> Result<impl Iterator<Item = Hypergraph>, LemmaError> {
    let candidates = candidate_edges(n, sizes);
    let total = candidates.len() as u128;
    let needed = (0..=max_edges.min(candidates.len()) as u128)
        .fold(0u128, |acc, j| acc.saturating_add(binomial(total, j)));
    if needed > cap {
        return Err(LemmaError::CapExceeded { needed, cap });
    }
    Ok((0..=max_edges.min(candidates.len())).flat_map(move |j| {
        let candidates = candidates.clone();
        (0..candidates.len()).combinations(j).map(move |idx| {
            let edges = idx.into_iter().map(|i| candidates[i].clone()).collect();
            Hypergraph::from_sorted_unchecked(n, edges)
        })
    }))
}

/// Perfect matching by trying every set of `n / s` edges.
pub fn brute_force_has_matching(h: &Hypergraph) -> bool {
    let n = h.n();
    let Some(s) = h.uniformity() else {
        return n == 0;
    };
    if !n.is_multiple_of(s) {
        return false;
    }
    h.edges().iter().combinations(n / s).any(|set| {
        let mut seen = vec![false; n];
        set.iter().flat_map(|e| e.iter()).all(|&v| !std::mem::replace(&mut seen[v], true))
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub hypergraph: Hypergraph,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checked: usize,
    pub skipped: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Suite {
    Obs1,
    Blocks,
    Edgebound,
    SparsityOracle,
    MatchingOracle,
}

impl Suite {
    pub const ALL: [Suite; 5] =
        [Suite::Obs1, Suite::Blocks, Suite::Edgebound, Suite::SparsityOracle, Suite::MatchingOracle];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Obs1 => "obs1",
            Suite::Blocks => "blocks",
            Suite::Edgebound => "edgebound",
            Suite::SparsityOracle => "sparsity-oracle",
            Suite::MatchingOracle => "matching-oracle",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }
}

/// Size limits and sampling settings shared by the suites.
#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub max_n: usize,
    pub max_edges: usize,
    pub samples: usize,
    pub seed: Seed,
    pub cap: u128,
}

impl SuiteConfig {
    pub fn defaults(suite: Suite) -> SuiteConfig {
        let (max_n, max_edges, samples) = match suite {
            Suite::Obs1 => (6, 5, 0),
            Suite::Blocks => (5, 5, 0),
            Suite::Edgebound => (14, 14, 200),
            Suite::SparsityOracle => (14, 12, 200),
            Suite::MatchingOracle => (12, 0, 100),
        };
        SuiteConfig { max_n, max_edges, samples, seed: Seed(0), cap: DEFAULT_ENUMERATION_CAP }
    }
}

enum Outcome {
    Pass,
    Skip,
    Fail(String),
}

fn collect(suite: Suite, results: Vec<(Hypergraph, Outcome)>) -> SuiteReport {
    let mut report =
        SuiteReport { suite: suite.name().to_string(), checked: 0, skipped: 0, counterexamples: Vec::new() };
    for (h, outcome) in results {
        match outcome {
            Outcome::Pass => report.checked += 1,
            Outcome::Skip => report.skipped += 1,
            Outcome::Fail(detail) => {
                report.checked += 1;
                report.counterexamples.push(Counterexample { hypergraph: h, detail });
            }
        }
    }
    report
}

fn exhaustive(
    ns: std::ops::RangeInclusive<usize>,
    cfg: &SuiteConfig,
    sizes: &[usize],
    check: impl Fn(&Hypergraph) -> Outcome + Sync,
) -> Result<Vec<(Hypergraph, Outcome)>, LemmaError> {
    let mut out = Vec::new();
    for n in ns {
        let all: Vec<Hypergraph> = enumerate_hypergraphs(n, cfg.max_edges, sizes, cfg.cap)?.collect();
        let results: Vec<(Hypergraph, Outcome)> = all
            .into_par_iter()
            .map(|h| {
                let o = check(&h);
                (h, o)
            })
            .collect();
        out.extend(results);
    }
    Ok(out)
}

fn obs1_check(h: &Hypergraph) -> Outcome {
    match connected_bound_check(h) {
        Ok(true) => Outcome::Pass,
        Ok(false) => Outcome::Fail("vertex count exceeds 1 + sum(|e| - 1)".to_string()),
        Err(_) => Outcome::Skip,
    }
}

fn blocks_check(h: &Hypergraph) -> Outcome {
    match find_small_cut(h) {
        Ok(cut) if validate_cut(h, &cut) => Outcome::Pass,
        Ok(cut) => Outcome::Fail(format!("invalid witness {cut:?}")),
        Err(LemmaError::Counterexample(msg)) => Outcome::Fail(msg),
        Err(_) => Outcome::Skip,
    }
}

fn edgebound_check(h: &Hypergraph) -> Outcome {
    match edge_bound_check(h, 3) {
        Ok(b) if b.holds => Outcome::Pass,
        Ok(b) => Outcome::Fail(format!("{:?} spans {} > {} edges", b.worst.witness, b.worst.count, b.bound)),
        Err(_) => Outcome::Skip,
    }
}

/// Uniform hypergraph on `n` vertices with exactly `edges` distinct `s`-edges.
fn random_uniform(rng: &mut impl Rng, n: usize, s: usize, edges: usize) -> Hypergraph {
    let candidates = candidate_edges(n, &[s]);
    let chosen: Vec<Edge> = candidates.choose_multiple(rng, edges).cloned().collect();
    Hypergraph::new(n, chosen).expect("distinct candidate edges")
}

fn sparsity_oracle_check(h: &Hypergraph) -> Outcome {
    let fast = check_sparsity(h, 16, 3);
    let slow = brute_force_sparsity(h, 16, 3, DEFAULT_BRUTE_FORCE_CAP);
    match (fast, slow) {
        (Ok(a), Ok(b)) if a != b => Outcome::Fail(format!("search {a:?} differs from enumeration {b:?}")),
        (Ok(a), Ok(_)) => match &a.violator {
            Some(v) if !is_minimal_violator(h, &v.edges, 3) => {
                Outcome::Fail(format!("violator {:?} is not inclusion-minimal", v.edges))
            }
            _ => Outcome::Pass,
        },
        (a, b) => Outcome::Fail(format!("unexpected errors {a:?} / {b:?}")),
    }
}

fn matching_oracle_check(h: &Hypergraph, budget: Duration) -> Outcome {
    let expected = brute_force_has_matching(h);
    match find_perfect_matching(h, budget) {
        Ok(MatchOutcome::Found(m)) if expected && m.is_perfect_for(h) => Outcome::Pass,
        Ok(MatchOutcome::NoMatching) if !expected => Outcome::Pass,
        other => Outcome::Fail(format!("solver {other:?}, enumeration says {expected}")),
    }
}

/// Randomized instances for the sampled suites; instance `i` uses
/// `seed.derive(i)`.
fn random_instances(suite: Suite, cfg: &SuiteConfig) -> Vec<Hypergraph> {
    let make = |i: u64| {
        let mut rng = cfg.seed.derive(i).rng();
        match suite {
            Suite::Edgebound => {
                let n = rng.random_range(6..=cfg.max_n.max(6));
                let e = rng.random_range(1..=cfg.max_edges.min(n).max(1));
                random_uniform(&mut rng, n, 3, e)
            }
            Suite::SparsityOracle => {
                let n = rng.random_range(5..=cfg.max_n.clamp(5, 9));
                let e = rng.random_range(1..=cfg.max_edges.max(1));
                random_uniform(&mut rng, n, 3, e)
            }
            _ => unreachable!("exhaustive suite"),
        }
    };
    match suite {
        Suite::SparsityOracle => (0..cfg.samples as u64).into_par_iter().map(make).collect(),
        // keep drawing until enough instances meet the hypothesis
        Suite::Edgebound => {
            let mut out = Vec::new();
            let mut met = 0;
            let mut i = 0u64;
            while met < cfg.samples && i < 50 * cfg.samples as u64 + 50 {
                let h = make(i);
                if edge_bound_check(&h, 3).is_ok() {
                    met += 1;
                }
                out.push(h);
                i += 1;
            }
            out
        }
        _ => unreachable!("exhaustive suite"),
    }
}

/// Instances a randomized suite checks; empty for the exhaustive suites.
pub fn sampled_instances(suite: Suite, cfg: &SuiteConfig) -> Vec<Hypergraph> {
    match suite {
        Suite::Obs1 | Suite::Blocks => Vec::new(),
        Suite::MatchingOracle => matching_instances(cfg),
        _ => random_instances(suite, cfg),
    }
}

fn matching_instances(cfg: &SuiteConfig) -> Vec<Hypergraph> {
    let mut out = Vec::new();
    for s in [2usize, 3, 4] {
        for i in 0..cfg.samples as u64 {
            let mut rng = cfg.seed.derive(s as u64).derive(i).rng();
            let mut n = s * rng.random_range(1..=cfg.max_n.max(s) / s);
            if rng.random_bool(0.1) && n < cfg.max_n {
                n += 1;
            }
            let pool = candidate_edges(n, &[s]).len();
            let lo = n / s;
            let hi = (3 * n).min(pool).max(lo);
            let e = rng.random_range(lo..=hi);
            out.push(random_uniform(&mut rng, n, s, e));
        }
    }
    out
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteReport, LemmaError> {
    let results = match suite {
        Suite::Obs1 => exhaustive(1..=cfg.max_n, cfg, &[2, 3, 4], obs1_check)?,
        Suite::Blocks => exhaustive(4..=cfg.max_n.max(3), cfg, &[2, 3], blocks_check)?,
        Suite::Edgebound => {
            // the complete 3-uniform hypergraph on 4 vertices violates the
            // hypothesis and must be skipped, not failed
            let mut instances = vec![Hypergraph::complete(4, 3)];
            instances.extend(random_instances(suite, cfg));
            instances.into_par_iter().map(|h| (h.clone(), edgebound_check(&h))).collect()
        }
        Suite::SparsityOracle => random_instances(suite, cfg)
            .into_par_iter()
            .map(|h| (h.clone(), sparsity_oracle_check(&h)))
            .collect(),
        Suite::MatchingOracle => matching_instances(cfg)
            .into_par_iter()
            .map(|h| (h.clone(), matching_oracle_check(&h, DEFAULT_MATCH_BUDGET)))
            .collect(),
    };
    Ok(collect(suite, results))
}
