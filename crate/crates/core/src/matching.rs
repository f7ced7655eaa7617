//! Exact perfect-matching search in uniform hypergraphs.
//!
//! The search is a cover search with most-constrained-vertex branching: pick
//! the uncovered vertex with the fewest still-usable incident edges (lowest id
//! on ties), try those edges in lexicographic order, and backtrack. A vertex
//! with no usable edge refutes the branch. Each call carries a wall-clock
//! budget so that refutation and timeout stay distinguishable.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::{Edge, Hypergraph, Matching, Vertex};

pub const DEFAULT_MATCH_BUDGET: Duration = Duration::from_secs(10);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("hypergraph is not uniform")]
    NonUniform,
    #[error("hypergraph is not {0}-uniform")]
    WrongUniformity(usize),
    #[error("vertex count {n} is not 1 mod {s}")]
    Divisibility { n: usize, s: usize },
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("matching does not partition the vertex set minus {removed}")]
    NotAPartition { removed: Vertex },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatchOutcome {
    Found(Matching),
    NoMatching,
    BudgetExhausted,
}

struct CoverSearch<'a> {
    edges: &'a [Edge],
    s: usize,
    incident: Vec<Vec<usize>>,
    covered: Vec<bool>,
    /// Covered vertices per edge; an edge is usable iff this is zero.
    blocked: Vec<u32>,
    /// Usable incident edges per vertex.
    usable: Vec<usize>,
    uncovered: usize,
    chosen: Vec<usize>,
    deadline: Instant,
    nodes: u64,
    exhausted: bool,
}

impl<'a> CoverSearch<'a> {
    fn new(h: &'a Hypergraph, s: usize, budget: Duration) -> Self {
        let incident = h.incidence();
        let usable = incident.iter().map(Vec::len).collect();
        CoverSearch {
            edges: h.edges(),
            s,
            incident,
            covered: vec![false; h.n()],
            blocked: vec![0; h.edge_count()],
            usable,
            uncovered: h.n(),
            chosen: Vec::new(),
            deadline: Instant::now() + budget,
            nodes: 0,
            exhausted: false,
        }
    }

    fn cover(&mut self, v: Vertex) {
        self.covered[v] = true;
        self.uncovered -= 1;
        for &f in &self.incident[v] {
            self.blocked[f] += 1;
            if self.blocked[f] == 1 {
                for &w in &self.edges[f] {
                    self.usable[w] -= 1;
                }
            }
        }
    }

    fn uncover(&mut self, v: Vertex) {
        for &f in self.incident[v].iter().rev() {
            if self.blocked[f] == 1 {
                for &w in &self.edges[f] {
                    self.usable[w] += 1;
                }
            }
            self.blocked[f] -= 1;
        }
        self.covered[v] = false;
        self.uncovered += 1;
    }

    fn search(&mut self) -> bool {
        if self.uncovered == 0 {
            return true;
        }
        self.nodes += 1;
        if self.nodes.is_multiple_of(256) && Instant::now() >= self.deadline {
            self.exhausted = true;
        }
        if self.exhausted {
            return false;
        }
        let Some(v) = (0..self.covered.len())
            .filter(|&v| !self.covered[v])
            .min_by_key(|&v| self.usable[v])
        else {
            return true;
        };
        if self.usable[v] == 0 {
            return false;
        }
        let candidates: Vec<usize> = self.incident[v]
            .iter()
            .copied()
            .filter(|&f| self.blocked[f] == 0)
            .collect();
        for f in candidates {
            for i in 0..self.edges[f].len() {
                self.cover(self.edges[f][i]);
            }
            self.chosen.push(f);
            if self.search() {
                return true;
            }
            self.chosen.pop();
            for i in (0..self.edges[f].len()).rev() {
                self.uncover(self.edges[f][i]);
            }
            if self.exhausted {
                return false;
            }
        }
        false
    }

    /// Runs the search with `removed` (if any) pre-covered.
    fn run(mut self, removed: Option<Vertex>) -> MatchOutcome {
        if let Some(v) = removed {
            self.cover(v);
        }
        if self.s == 0 || !self.uncovered.is_multiple_of(self.s) {
            return MatchOutcome::NoMatching;
        }
        if self.search() {
            let edges = self.chosen.iter().map(|&f| self.edges[f].clone()).collect();
            MatchOutcome::Found(Matching::new(edges).expect("search keeps edges disjoint"))
        } else if self.exhausted {
            MatchOutcome::BudgetExhausted
        } else {
            MatchOutcome::NoMatching
        }
    }
}

/// Decides whether `h` has a perfect matching and returns one if so.
pub fn find_perfect_matching(h: &Hypergraph, budget: Duration) -> Result<MatchOutcome, MatchingError> {
    let Some(s) = h.uniformity() else {
        if h.edge_count() > 0 {
            return Err(MatchingError::NonUniform);
        }
        return Ok(if h.n() == 0 {
            MatchOutcome::Found(Matching::new(Vec::new()).expect("empty matching"))
        } else {
            MatchOutcome::NoMatching
        });
    };
    Ok(CoverSearch::new(h, s, budget).run(None))
}

/// Perfect matching of `h - removed`, reported in the ids of `h`.
pub fn find_perfect_matching_without(
    h: &Hypergraph,
    s: usize,
    removed: Vertex,
    budget: Duration,
) -> Result<MatchOutcome, MatchingError> {
    if removed >= h.n() {
        return Err(MatchingError::VertexOutOfRange { vertex: removed, n: h.n() });
    }
    if !h.is_uniform(s) {
        return Err(MatchingError::WrongUniformity(s));
    }
    Ok(CoverSearch::new(h, s, budget).run(Some(removed)))
}

/// Result of the matching search for `H - v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum DeletionOutcome {
    Matched { matching: Vec<Edge> },
    NoMatching,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexMatchability {
    pub vertex: Vertex,
    #[serde(flatten)]
    pub outcome: DeletionOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchabilityReport {
    pub all_matchable: bool,
    pub per_vertex: Vec<VertexMatchability>,
}

impl MatchabilityReport {
    pub fn any_exhausted(&self) -> bool {
        self.per_vertex
            .iter()
            .any(|e| e.outcome == DeletionOutcome::BudgetExhausted)
    }

    pub fn failing_vertices(&self) -> Vec<Vertex> {
        self.per_vertex
            .iter()
            .filter(|e| !matches!(e.outcome, DeletionOutcome::Matched { .. }))
            .map(|e| e.vertex)
            .collect()
    }
}

fn check_deletion_shape(h: &Hypergraph, s: usize) -> Result<(), MatchingError> {
    if !h.is_uniform(s) {
        return Err(MatchingError::WrongUniformity(s));
    }
    if s == 0 || h.n() % s != 1 % s {
        return Err(MatchingError::Divisibility { n: h.n(), s });
    }
    Ok(())
}

fn deletion_outcome(h: &Hypergraph, s: usize, v: Vertex, budget: Duration) -> DeletionOutcome {
    match CoverSearch::new(h, s, budget).run(Some(v)) {
        MatchOutcome::Found(m) => DeletionOutcome::Matched { matching: m.edges().to_vec() },
        MatchOutcome::NoMatching => DeletionOutcome::NoMatching,
        MatchOutcome::BudgetExhausted => DeletionOutcome::BudgetExhausted,
    }
}

/// Searches a perfect matching of `H - v` for every vertex `v`.
pub fn all_deletions_matchable(
    h: &Hypergraph,
    s: usize,
    budget: Duration,
) -> Result<MatchabilityReport, MatchingError> {
    check_deletion_shape(h, s)?;
    let per_vertex: Vec<VertexMatchability> = (0..h.n())
        .into_par_iter()
        .map(|v| VertexMatchability { vertex: v, outcome: deletion_outcome(h, s, v, budget) })
        .collect();
    let all_matchable = per_vertex
        .iter()
        .all(|e| matches!(e.outcome, DeletionOutcome::Matched { .. }));
    Ok(MatchabilityReport { all_matchable, per_vertex })
}

/// First vertex (in id order) whose deletion leaves no perfect matching, or
/// whose search ran out of budget. `None` means every deletion is matchable.
pub fn first_unmatchable_deletion(
    h: &Hypergraph,
    s: usize,
    budget: Duration,
) -> Result<Option<(Vertex, DeletionOutcome)>, MatchingError> {
    check_deletion_shape(h, s)?;
    Ok((0..h.n()).find_map(|v| match deletion_outcome(h, s, v, budget) {
        DeletionOutcome::Matched { .. } => None,
        other => Some((v, other)),
    }))
}

/// Colors the `i`-th matching edge with color `i`; `removed` stays uncolored.
pub fn matching_to_coloring(
    matching: &Matching,
    removed: Vertex,
    n: usize,
) -> Result<Vec<Option<usize>>, MatchingError> {
    let covered = matching.covered();
    let expected = (0..n).filter(|&v| v != removed);
    if removed >= n || covered.len() + 1 != n || !covered.iter().copied().eq(expected) {
        return Err(MatchingError::NotAPartition { removed });
    }
    let mut colors = vec![None; n];
    for (i, e) in matching.edges().iter().enumerate() {
        for &v in e {
            colors[v] = Some(i);
        }
    }
    Ok(colors)
}
