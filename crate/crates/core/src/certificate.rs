//! Certificates: verify a sampled hypergraph end to end, record every witness,
//! and re-check a recorded certificate without repeating any search except
//! the deterministic sparsity and subset scans.
//!
//! With `G` the complement of the 2-section of an `s`-uniform `H` on
//! `n = s(k-1) + 1` vertices:
//! * every `(s+1)`-set spanning at least one edge of `G` means `alpha(G) <= s`,
//!   hence `chi(G) >= ceil(n / s) = k`;
//! * a perfect matching of `H - v` is a partition of `V - v` into `k - 1`
//!   independent sets of `G`, so `chi(G - v) <= k - 1` and `chi(G) <= k`;
//! * every `(s+1)`-set spanning at least `r + 1` edges keeps an edge after
//!   deleting any `r` edges, so `alpha(G - R) <= s` and `chi(G - R) >= k`.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::{Graph, Hypergraph, Matching};
use crate::matching::{
    all_deletions_matchable, matching_to_coloring, DeletionOutcome, MatchabilityReport, MatchingError,
    DEFAULT_MATCH_BUDGET,
};
use crate::oracles::is_proper_partial;
use crate::params::{derive_params, ConstructionParams, Seed};
use crate::sparsity::{check_sparsity_with_budget, SparsityError, SparsityVerdict};
use crate::subsets::{min_subset_edges, SubsetEdgeCount, SubsetError};

pub const SCHEMA: &str = "critgraph.certificate.v1";
pub const DEFAULT_SPARSITY_BUDGET: u64 = 200_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conclusions {
    /// `Some(k)` only when both the lower and the upper bound are certified.
    pub chi: Option<usize>,
    pub vertex_critical: bool,
    pub robust_to_r: bool,
    /// A search budget ran out, so a negative verdict may be spurious.
    pub inconclusive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: String,
    pub tool_version: String,
    pub params: ConstructionParams,
    pub seed: Option<Seed>,
    pub restart: Option<u64>,
    /// Node budget of the sparsity search, needed to reproduce a budget stop.
    pub sparsity_budget: u64,
    pub hypergraph: Hypergraph,
    pub graph: Graph,
    pub matchability: MatchabilityReport,
    pub sparsity: SparsityVerdict,
    pub min_subset_edges: SubsetEdgeCount,
    pub conclusions: Conclusions,
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub match_budget: Duration,
    pub sparsity_budget: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { match_budget: DEFAULT_MATCH_BUDGET, sparsity_budget: DEFAULT_SPARSITY_BUDGET }
    }
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("hypergraph has {got} vertices, parameters need {expected}")]
    VertexCount { got: usize, expected: usize },
    #[error("hypergraph is not {0}-uniform")]
    NotUniform(usize),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error(transparent)]
    Subsets(#[from] SubsetError),
    #[error(transparent)]
    Sparsity(SparsityError),
}

/// Derives the conclusions from the recorded evidence.
pub fn conclude(
    params: &ConstructionParams,
    matchability: &MatchabilityReport,
    sparsity: &SparsityVerdict,
    min_count: usize,
) -> Conclusions {
    let lower = min_count >= 1;
    let some_matched = matchability
        .per_vertex
        .iter()
        .any(|e| matches!(e.outcome, DeletionOutcome::Matched { .. }));
    let chi = (lower && some_matched).then_some(params.k);
    let vertex_critical = chi.is_some() && matchability.all_matchable;
    let robust_to_r = matchability.all_matchable && sparsity.holds && min_count > params.r;
    let inconclusive = matchability.any_exhausted() || !sparsity.complete;
    Conclusions { chi, vertex_critical, robust_to_r, inconclusive }
}

/// Runs every check on `h` and assembles a certificate.
pub fn verify_construction(
    h: &Hypergraph,
    params: &ConstructionParams,
    seed: Option<Seed>,
    restart: Option<u64>,
    opts: VerifyOptions,
) -> Result<Certificate, VerifyError> {
    if h.n() != params.n {
        return Err(VerifyError::VertexCount { got: h.n(), expected: params.n });
    }
    if !h.is_uniform(params.s) && h.edge_count() > 0 {
        return Err(VerifyError::NotUniform(params.s));
    }
    let matchability = all_deletions_matchable(h, params.s, opts.match_budget)?;
    let sparsity = match check_sparsity_with_budget(h, params.m, params.s, opts.sparsity_budget) {
        Ok(v) => v,
        Err(SparsityError::BudgetExhausted(_)) => SparsityVerdict::inconclusive(params.m, params.s),
        Err(e) => return Err(VerifyError::Sparsity(e)),
    };
    let graph = h.two_section().complement();
    let min = min_subset_edges(&graph, params.s + 1)?;
    let conclusions = conclude(params, &matchability, &sparsity, min.count);
    Ok(Certificate {
        schema: SCHEMA.to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        params: params.clone(),
        seed,
        restart,
        sparsity_budget: opts.sparsity_budget,
        hypergraph: h.clone(),
        graph,
        matchability,
        sparsity,
        min_subset_edges: min,
        conclusions,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub ok: bool,
    pub reasons: Vec<String>,
}

/// Re-checks a certificate: parameters, graph, every matching and the
/// coloring it induces, the subset witness and its minimality, the sparsity
/// verdict, and the conclusions. Negative search outcomes (no matching,
/// budget stops) are accepted as recorded, since they can only weaken the
/// conclusions.
pub fn check_certificate(c: &Certificate) -> CheckReport {
    let mut reasons = Vec::new();
    check_header(c, &mut reasons);
    let p = &c.params;
    let h = &c.hypergraph;
    let shape_ok = h.n() == p.n && (h.edge_count() == 0 || h.is_uniform(p.s));
    if !shape_ok {
        reasons.push(format!("hypergraph is not a {}-uniform hypergraph on {} vertices", p.s, p.n));
    }
    if c.graph != h.two_section().complement() {
        reasons.push("graph is not the complement of the 2-section".to_string());
    }
    check_matchability(c, &mut reasons);

    let t = p.s + 1;
    let min = &c.min_subset_edges;
    let witness_ok = min.witness.len() == t
        && min.witness.windows(2).all(|w| w[0] < w[1])
        && min.witness.iter().all(|&v| v < c.graph.n());
    if !witness_ok {
        reasons.push(format!("subset witness is not a sorted {t}-set of vertices"));
    } else if c.graph.edges_within(&min.witness) != min.count {
        reasons.push("subset witness edge count mismatch".to_string());
    } else if t <= c.graph.n() {
        match min_subset_edges(&c.graph, t) {
            Ok(actual) if actual.count < min.count => {
                reasons.push(format!("a {t}-set spans only {} edges, below the recorded minimum", actual.count))
            }
            Ok(_) => {}
            Err(e) => reasons.push(format!("subset scan failed: {e}")),
        }
    }

    if shape_ok {
        let rerun = match check_sparsity_with_budget(h, c.sparsity.m, p.s, c.sparsity_budget) {
            Ok(v) => Some(v),
            Err(SparsityError::BudgetExhausted(_)) => Some(SparsityVerdict::inconclusive(p.m, p.s)),
            Err(e) => {
                reasons.push(format!("sparsity recheck failed: {e}"));
                None
            }
        };
        if c.sparsity.m != p.m || c.sparsity.s != p.s {
            reasons.push("sparsity window does not match parameters".to_string());
        } else if rerun.is_some_and(|v| v != c.sparsity) {
            reasons.push("sparsity verdict mismatch".to_string());
        }
    }

    if conclude(p, &c.matchability, &c.sparsity, min.count) != c.conclusions {
        reasons.push("conclusion mismatch".to_string());
    }
    CheckReport { ok: reasons.is_empty(), reasons }
}

fn check_header(c: &Certificate, reasons: &mut Vec<String>) {
    if c.schema != SCHEMA {
        reasons.push(format!("unknown schema {:?}", c.schema));
    }
    match derive_params(c.params.r, c.params.k, c.params.c) {
        Ok(expected) if expected == c.params => {}
        Ok(_) => reasons.push("parameters do not match their derivation".to_string()),
        Err(e) => reasons.push(format!("invalid parameters: {e}")),
    }
}

fn check_matchability(c: &Certificate, reasons: &mut Vec<String>) {
    let h = &c.hypergraph;
    let n = h.n();
    let report = &c.matchability;
    let ids_ok = report.per_vertex.len() == n
        && report.per_vertex.iter().enumerate().all(|(i, e)| e.vertex == i);
    if !ids_ok {
        reasons.push("matchability report does not list every vertex once in order".to_string());
    }
    let mut all = ids_ok;
    for entry in &report.per_vertex {
        let DeletionOutcome::Matched { matching } = &entry.outcome else {
            all = false;
            continue;
        };
        let v = entry.vertex;
        let valid = Matching::new(matching.clone())
            .ok()
            .filter(|m| m.edges().iter().all(|e| h.contains_edge(e)) && m.edges() == matching.as_slice())
            .and_then(|m| matching_to_coloring(&m, v, n).ok().map(|col| (m, col)));
        match valid {
            None => reasons.push(format!("matching not disjoint/covering for vertex {v}")),
            Some((m, colors)) => {
                if m.len() + 1 != c.params.k {
                    reasons.push(format!("coloring of G - {v} uses {} colors, expected k - 1", m.len()));
                }
                if v < c.graph.n() && !is_proper_partial(&c.graph, &colors) {
                    reasons.push(format!("coloring of G - {v} is not proper"));
                }
            }
        }
    }
    if all != report.all_matchable {
        reasons.push("all_matchable flag disagrees with the per-vertex outcomes".to_string());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> VerifyOptions {
        VerifyOptions { match_budget: Duration::from_secs(10), sparsity_budget: 1_000_000 }
    }

    #[test]
    fn complete_hypergraph_is_dense() {
        let params = derive_params(1, 2, 12.0).unwrap();
        let h = Hypergraph::complete(5, 4);
        let cert = verify_construction(&h, &params, None, None, quick()).unwrap();
        assert!(cert.matchability.all_matchable);
        assert!(!cert.sparsity.holds);
        assert!(cert.sparsity.violator.is_some());
        assert!(!cert.conclusions.robust_to_r);
        // G is edgeless, so nothing certifies the lower bound
        assert_eq!(cert.min_subset_edges.count, 0);
        assert_eq!(cert.conclusions.chi, None);
        assert!(check_certificate(&cert).ok);
    }

    #[test]
    fn failing_vertex_is_recorded() {
        let params = derive_params(1, 3, 12.0).unwrap();
        // n = 9, one edge only: every deletion leaves uncovered vertices
        let h = Hypergraph::new(9, vec![vec![0, 1, 2, 3]]).unwrap();
        let cert = verify_construction(&h, &params, None, None, quick()).unwrap();
        assert!(!cert.matchability.all_matchable);
        assert_eq!(cert.matchability.failing_vertices().len(), 9);
        assert!(!cert.conclusions.robust_to_r);
        assert!(check_certificate(&cert).ok, "{:?}", check_certificate(&cert).reasons);
    }

    #[test]
    fn tampering_is_detected() {
        let params = derive_params(1, 2, 12.0).unwrap();
        let h = Hypergraph::complete(5, 4);
        let cert = verify_construction(&h, &params, None, None, quick()).unwrap();

        let mut bad = cert.clone();
        if let DeletionOutcome::Matched { matching } = &mut bad.matchability.per_vertex[0].outcome {
            matching[0] = vec![0, 1, 2, 3];
        }
        let report = check_certificate(&bad);
        assert!(!report.ok);
        assert!(report.reasons.iter().any(|r| r.contains("matching not disjoint/covering")));

        let mut bad = cert.clone();
        bad.conclusions.robust_to_r = true;
        assert!(check_certificate(&bad).reasons.iter().any(|r| r == "conclusion mismatch"));

        let mut bad = cert;
        bad.graph = Graph::complete(5);
        assert!(!check_certificate(&bad).ok);
    }

    #[test]
    fn lowered_subset_count_is_detected() {
        let params = derive_params(1, 3, 12.0).unwrap();
        // two disjoint blocks: G holds a complete bipartite graph plus a universal vertex
        let h = Hypergraph::new(9, vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]).unwrap();
        let cert = verify_construction(&h, &params, None, None, quick()).unwrap();
        assert_eq!(cert.min_subset_edges.count, 4);
        assert_eq!(cert.conclusions.chi, Some(3));
        assert!(!cert.conclusions.vertex_critical);
        assert!(check_certificate(&cert).ok);

        let mut bad = cert;
        bad.min_subset_edges.count = 0;
        let reasons = check_certificate(&bad).reasons;
        assert!(reasons.iter().any(|r| r == "conclusion mismatch"), "{reasons:?}");
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let params = derive_params(1, 2, 12.0).unwrap();
        assert!(matches!(
            verify_construction(&Hypergraph::complete(6, 4), &params, None, None, quick()),
            Err(VerifyError::VertexCount { got: 6, expected: 5 })
        ));
        assert!(matches!(
            verify_construction(&Hypergraph::complete(5, 3), &params, None, None, quick()),
            Err(VerifyError::NotUniform(4))
        ));
    }
}
