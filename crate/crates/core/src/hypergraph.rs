//! Hypergraphs, simple graphs, and the structural transforms between them.
//!
//! Vertices are dense `usize` ids `0..n`. Both [`Hypergraph`] and [`Graph`]
//! keep a canonical form (sorted hyperedges, sorted adjacency lists) so that
//! equal objects serialize to equal bytes.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vertex = usize;

/// A hyperedge: a strictly increasing list of vertex ids.
pub type Edge = Vec<Vertex>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("vertex {vertex} out of range for a vertex set of size {n}")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("hyperedges must be non-empty")]
    EmptyEdge,
    #[error("hyperedge {0:?} repeats a vertex")]
    RepeatedVertex(Edge),
    #[error("duplicate hyperedge {0:?}")]
    DuplicateEdge(Edge),
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("{0}-{1} is not an edge of the graph")]
    NotAnEdge(Vertex, Vertex),
    #[error("matching edges {0:?} and {1:?} overlap")]
    OverlappingEdges(Edge, Edge),
}

/// Old/new vertex correspondence produced by operations that shrink the
/// vertex set. New ids are assigned in increasing order of old ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdMap {
    new_to_old: Vec<Vertex>,
}

impl IdMap {
    fn from_kept(kept: Vec<Vertex>) -> Self {
        debug_assert!(kept.windows(2).all(|w| w[0] < w[1]));
        IdMap { new_to_old: kept }
    }

    pub fn to_old(&self, new: Vertex) -> Vertex {
        self.new_to_old[new]
    }

    pub fn to_new(&self, old: Vertex) -> Option<Vertex> {
        self.new_to_old.binary_search(&old).ok()
    }

    pub fn len(&self) -> usize {
        self.new_to_old.len()
    }

    pub fn is_empty(&self) -> bool {
        self.new_to_old.is_empty()
    }

    pub fn kept(&self) -> &[Vertex] {
        &self.new_to_old
    }
}

fn canonical_edge(n: usize, mut edge: Edge) -> Result<Edge, StructureError> {
    if edge.is_empty() {
        return Err(StructureError::EmptyEdge);
    }
    edge.sort_unstable();
    if let Some(&vertex) = edge.iter().find(|&&v| v >= n) {
        return Err(StructureError::VertexOutOfRange { vertex, n });
    }
    if edge.windows(2).any(|w| w[0] == w[1]) {
        return Err(StructureError::RepeatedVertex(edge));
    }
    Ok(edge)
}

#[derive(Deserialize)]
struct RawHypergraph {
    n: usize,
    edges: Vec<Edge>,
}

/// A finite hypergraph on vertices `0..n` in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawHypergraph")]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Edge>,
}

impl TryFrom<RawHypergraph> for Hypergraph {
    type Error = StructureError;

    fn try_from(raw: RawHypergraph) -> Result<Self, Self::Error> {
        Hypergraph::new(raw.n, raw.edges)
    }
}

impl Hypergraph {
    /// Builds a hypergraph, sorting each edge and the edge list. Duplicate
    /// hyperedges are rejected rather than merged.
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self, StructureError> {
        let mut edges = edges
            .into_iter()
            .map(|e| canonical_edge(n, e))
            .collect::<Result<Vec<_>, _>>()?;
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(StructureError::DuplicateEdge(w[0].clone()));
        }
        Ok(Hypergraph { n, edges })
    }

    /// Caller guarantees canonical, duplicate-free, in-range edges.
    pub(crate) fn from_sorted_unchecked(n: usize, edges: Vec<Edge>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges.iter().all(|e| e.windows(2).all(|w| w[0] < w[1])
            && e.last().is_some_and(|&v| v < n)));
        Hypergraph { n, edges }
    }

    pub fn empty(n: usize) -> Self {
        Hypergraph { n, edges: Vec::new() }
    }

    /// All `s`-subsets of `0..n` as hyperedges.
    pub fn complete(n: usize, s: usize) -> Self {
        use itertools::Itertools;
        let edges = if s == 0 { Vec::new() } else { (0..n).combinations(s).collect() };
        Hypergraph { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// The common edge size, or `None` when there are no edges or sizes differ.
    pub fn uniformity(&self) -> Option<usize> {
        let s = self.edges.first()?.len();
        self.edges.iter().all(|e| e.len() == s).then_some(s)
    }

    /// True if every edge has exactly `s` vertices (vacuously true without edges).
    pub fn is_uniform(&self, s: usize) -> bool {
        self.edges.iter().all(|e| e.len() == s)
    }

    pub fn contains_edge(&self, edge: &[Vertex]) -> bool {
        self.edges.binary_search_by(|e| e.as_slice().cmp(edge)).is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in &self.edges {
            for &v in e {
                deg[v] += 1;
            }
        }
        deg
    }

    /// Per-vertex lists of incident edge indices, each in increasing order.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n];
        for (i, e) in self.edges.iter().enumerate() {
            for &v in e {
                inc[v].push(i);
            }
        }
        inc
    }

    /// The graph on the same vertices joining every pair that shares a hyperedge.
    pub fn two_section(&self) -> Graph {
        let mut adj: Vec<BTreeSet<Vertex>> = vec![BTreeSet::new(); self.n];
        for e in &self.edges {
            for (i, &u) in e.iter().enumerate() {
                for &v in &e[i + 1..] {
                    adj[u].insert(v);
                    adj[v].insert(u);
                }
            }
        }
        Graph {
            adj: adj.into_iter().map(|s| s.into_iter().collect()).collect(),
        }
    }

    /// `H - v`: drops `v` and every hyperedge through it; survivors are renumbered.
    pub fn delete_vertex(&self, v: Vertex) -> Result<(Hypergraph, IdMap), StructureError> {
        if v >= self.n {
            return Err(StructureError::VertexOutOfRange { vertex: v, n: self.n });
        }
        let remap = |u: Vertex| if u > v { u - 1 } else { u };
        let edges = self
            .edges
            .iter()
            .filter(|e| !e.contains(&v))
            .map(|e| e.iter().map(|&u| remap(u)).collect())
            .collect();
        let kept = (0..self.n).filter(|&u| u != v).collect();
        Ok((
            Hypergraph::from_sorted_unchecked(self.n - 1, edges),
            IdMap::from_kept(kept),
        ))
    }

    /// `H - e` for the edge at `index`, keeping the vertex set.
    pub fn without_edge(&self, index: usize) -> Hypergraph {
        let mut edges = self.edges.clone();
        edges.remove(index);
        Hypergraph { n: self.n, edges }
    }

    /// Restriction to `keep`: hyperedges become `e ∩ keep` when that has at
    /// least two vertices; coinciding projections are merged.
    pub fn restrict(&self, keep: &[Vertex]) -> Result<(Hypergraph, IdMap), StructureError> {
        let kept: BTreeSet<Vertex> = keep.iter().copied().collect();
        if let Some(&vertex) = kept.iter().find(|&&v| v >= self.n) {
            return Err(StructureError::VertexOutOfRange { vertex, n: self.n });
        }
        let map = IdMap::from_kept(kept.into_iter().collect());
        let projected: BTreeSet<Edge> = self
            .edges
            .iter()
            .map(|e| e.iter().filter_map(|&u| map.to_new(u)).collect::<Edge>())
            .filter(|e| e.len() >= 2)
            .collect();
        Ok((
            Hypergraph::from_sorted_unchecked(map.len(), projected.into_iter().collect()),
            map,
        ))
    }
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
}

/// A simple undirected graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = StructureError;

    fn try_from(raw: RawGraph) -> Result<Self, Self::Error> {
        Graph::from_edges(raw.n, raw.edges)
    }
}

impl From<Graph> for RawGraph {
    fn from(g: Graph) -> Self {
        RawGraph { n: g.n(), edges: g.edges().collect() }
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n] }
    }

    pub fn complete(n: usize) -> Self {
        Graph {
            adj: (0..n).map(|v| (0..n).filter(|&u| u != v).collect()).collect(),
        }
    }

    /// The cycle `0-1-...-(n-1)-0`; requires `n >= 3`.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least three vertices");
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("valid cycle")
    }

    /// Builds a graph from an edge list; repeated edges are merged.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (Vertex, Vertex)>,
    ) -> Result<Self, StructureError> {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(StructureError::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(StructureError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Graph { adj })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn complement(&self) -> Graph {
        let n = self.n();
        let adj = (0..n)
            .map(|v| {
                let mut it = self.adj[v].iter().peekable();
                (0..n)
                    .filter(|&u| {
                        while it.next_if(|&&w| w < u).is_some() {}
                        u != v && it.peek() != Some(&&u)
                    })
                    .collect()
            })
            .collect();
        Graph { adj }
    }

    /// `G - R`; every pair in `removed` must be an edge.
    pub fn delete_edges(&self, removed: &[(Vertex, Vertex)]) -> Result<Graph, StructureError> {
        let mut adj = self.adj.clone();
        for &(u, v) in removed {
            if !self.has_edge(u, v) {
                return Err(StructureError::NotAnEdge(u, v));
            }
            adj[u].retain(|&w| w != v);
            adj[v].retain(|&w| w != u);
        }
        Ok(Graph { adj })
    }

    /// Subgraph induced by `keep`, renumbered in increasing order of old ids.
    pub fn induced(&self, keep: &[Vertex]) -> Result<(Graph, IdMap), StructureError> {
        let kept: BTreeSet<Vertex> = keep.iter().copied().collect();
        if let Some(&vertex) = kept.iter().find(|&&v| v >= self.n()) {
            return Err(StructureError::VertexOutOfRange { vertex, n: self.n() });
        }
        let map = IdMap::from_kept(kept.into_iter().collect());
        let adj = map
            .kept()
            .iter()
            .map(|&old| self.adj[old].iter().filter_map(|&w| map.to_new(w)).collect())
            .collect();
        Ok((Graph { adj }, map))
    }

    /// `G - W`: removes the listed vertices and their incident edges.
    pub fn delete_vertices(&self, removed: &[Vertex]) -> Result<(Graph, IdMap), StructureError> {
        if let Some(&vertex) = removed.iter().find(|&&v| v >= self.n()) {
            return Err(StructureError::VertexOutOfRange { vertex, n: self.n() });
        }
        let keep: Vec<Vertex> = (0..self.n()).filter(|v| !removed.contains(v)).collect();
        self.induced(&keep)
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for root in 0..n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            queue.push_back(root);
            let mut class = Vec::new();
            while let Some(v) = queue.pop_front() {
                class.push(v);
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            class.sort_unstable();
            out.push(class);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Number of edges with both ends in `set`.
    pub fn edges_within(&self, set: &[Vertex]) -> usize {
        let mut count = 0;
        for (i, &u) in set.iter().enumerate() {
            for &v in &set[i + 1..] {
                if self.has_edge(u, v) {
                    count += 1;
                }
            }
        }
        count
    }

    /// Adjacency rows as packed bit words (`ceil(n / 64)` words per row).
    pub fn bit_rows(&self) -> Vec<Vec<u64>> {
        let words = self.n().div_ceil(64);
        self.adj
            .iter()
            .map(|list| {
                let mut row = vec![0u64; words];
                for &v in list {
                    row[v / 64] |= 1 << (v % 64);
                }
                row
            })
            .collect()
    }
}

/// Pairwise-disjoint hyperedges together with the vertices they cover.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    edges: Vec<Edge>,
    covered: Vec<Vertex>,
}

impl Matching {
    /// Edges are sorted into canonical order; overlapping edges are rejected.
    pub fn new(edges: Vec<Edge>) -> Result<Self, StructureError> {
        let mut edges: Vec<Edge> = edges
            .into_iter()
            .map(|mut e| {
                e.sort_unstable();
                e
            })
            .collect();
        edges.sort_unstable();
        let mut owner: std::collections::BTreeMap<Vertex, usize> = Default::default();
        for (i, e) in edges.iter().enumerate() {
            if e.is_empty() {
                return Err(StructureError::EmptyEdge);
            }
            for &v in e {
                if let Some(j) = owner.insert(v, i) {
                    if j == i {
                        return Err(StructureError::RepeatedVertex(e.clone()));
                    }
                    return Err(StructureError::OverlappingEdges(edges[j].clone(), e.clone()));
                }
            }
        }
        let covered = owner.into_keys().collect();
        Ok(Matching { edges, covered })
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn covered(&self) -> &[Vertex] {
        &self.covered
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Perfect for `h` when every edge belongs to `h` and the cover is all of `0..h.n()`.
    pub fn is_perfect_for(&self, h: &Hypergraph) -> bool {
        self.covered.len() == h.n()
            && self.covered.iter().enumerate().all(|(i, &v)| i == v)
            && self.edges.iter().all(|e| h.contains_edge(e))
    }
}
