//! Minimum number of edges induced by a vertex subset of fixed size.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::{Graph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubsetError {
    #[error("subset size {t} exceeds vertex count {n}")]
    TooLarge { t: usize, n: usize },
}

/// Edge count of `G[witness]`, where `witness` has the scanned size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetEdgeCount {
    pub count: usize,
    pub witness: Vec<Vertex>,
}

struct Scan<'a> {
    rows: &'a [Vec<u64>],
    n: usize,
    t: usize,
    chosen: Vec<Vertex>,
    mask: Vec<u64>,
}

impl<'a> Scan<'a> {
    fn new(rows: &'a [Vec<u64>], n: usize, t: usize) -> Self {
        Scan { rows, n, t, chosen: Vec::with_capacity(t), mask: vec![0; n.div_ceil(64).max(1)] }
    }

    fn gain(&self, v: Vertex) -> usize {
        self.rows[v]
            .iter()
            .zip(&self.mask)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    fn push(&mut self, v: Vertex) {
        self.chosen.push(v);
        self.mask[v / 64] |= 1 << (v % 64);
    }

    fn pop(&mut self) {
        let v = self.chosen.pop().expect("pop on empty scan");
        self.mask[v / 64] &= !(1 << (v % 64));
    }

    /// Lex-first subset extending `chosen` with count strictly below `limit()`.
    /// `limit` is re-read at each node so a shared bound can tighten it.
    fn best_below(&mut self, count: usize, limit: &dyn Fn() -> usize) -> Option<SubsetEdgeCount> {
        if count >= limit() {
            return None;
        }
        if self.chosen.len() == self.t {
            return Some(SubsetEdgeCount { count, witness: self.chosen.clone() });
        }
        let from = self.chosen.last().map_or(0, |&v| v + 1);
        let last = self.n - (self.t - self.chosen.len());
        let mut best: Option<SubsetEdgeCount> = None;
        for v in from..=last {
            let g = self.gain(v);
            self.push(v);
            let cap = best.as_ref().map_or(usize::MAX, |b| b.count);
            let found = self.best_below(count + g, &|| cap.min(limit()));
            self.pop();
            if let Some(f) = found {
                best = Some(f);
            }
        }
        best
    }

    /// Lex-first subset extending `chosen` with count at most `threshold`.
    fn first_at_most(&mut self, count: usize, threshold: usize) -> Option<SubsetEdgeCount> {
        if count > threshold {
            return None;
        }
        if self.chosen.len() == self.t {
            return Some(SubsetEdgeCount { count, witness: self.chosen.clone() });
        }
        let from = self.chosen.last().map_or(0, |&v| v + 1);
        let last = self.n - (self.t - self.chosen.len());
        for v in from..=last {
            let g = self.gain(v);
            self.push(v);
            let found = self.first_at_most(count + g, threshold);
            self.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }
}

fn check_size(g: &Graph, t: usize) -> Result<(), SubsetError> {
    if t > g.n() {
        return Err(SubsetError::TooLarge { t, n: g.n() });
    }
    Ok(())
}

/// Minimum of `|E(G[X])|` over all `X` with `|X| = t`, with the
/// lexicographically smallest `X` attaining it. Work is split by the
/// smallest vertex of `X`; chunks share the best count found so far.
pub fn min_subset_edges(g: &Graph, t: usize) -> Result<SubsetEdgeCount, SubsetError> {
    check_size(g, t)?;
    if t == 0 {
        return Ok(SubsetEdgeCount { count: 0, witness: Vec::new() });
    }
    let rows = g.bit_rows();
    let shared = AtomicUsize::new(usize::MAX);
    let per_chunk: Vec<Option<SubsetEdgeCount>> = (0..=g.n() - t)
        .into_par_iter()
        .map(|first| {
            let mut scan = Scan::new(&rows, g.n(), t);
            scan.push(first);
            // ties with the shared bound are kept so each chunk finds its own lex-first witness
            let found = scan.best_below(0, &|| shared.load(Ordering::Relaxed).saturating_add(1));
            if let Some(f) = &found {
                shared.fetch_min(f.count, Ordering::Relaxed);
            }
            found
        })
        .collect();
    Ok(per_chunk
        .into_iter()
        .flatten()
        .reduce(|a, b| if b.count < a.count { b } else { a })
        .expect("at least one subset exists"))
}

/// Lexicographically smallest `X` with `|X| = t` and `|E(G[X])| <= threshold`,
/// if any.
pub fn min_subset_edges_at_most(
    g: &Graph,
    t: usize,
    threshold: usize,
) -> Result<Option<SubsetEdgeCount>, SubsetError> {
    check_size(g, t)?;
    if t == 0 {
        return Ok(Some(SubsetEdgeCount { count: 0, witness: Vec::new() }));
    }
    let rows = g.bit_rows();
    Ok((0..=g.n() - t).into_par_iter().find_map_first(|first| {
        let mut scan = Scan::new(&rows, g.n(), t);
        scan.push(first);
        scan.first_at_most(0, threshold)
    }))
}
