//! Bounded sparsity: every set `F` of at most `m` hyperedges of an
//! `s`-uniform hypergraph must span at least `(s-1)|F|` vertices.
//!
//! Write `excess(F) = |∪F| - (s-1)|F|`. A single edge has excess 1, and if
//! `F` splits into vertex-disjoint parts `A`, `B` then
//! `excess(F) = excess(A) + excess(B)`, so a violator of least cardinality is
//! connected in the edge-intersection graph. [`check_sparsity`] therefore
//! enumerates connected edge sets only, by increasing size, and the first
//! size at which a violator appears gives a minimum-cardinality (hence
//! inclusion-minimal) violator. Adding an edge that meets the current union
//! in `t` vertices changes the excess by `1 - t`, which bounds how far a
//! branch can still fall.

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::Hypergraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SparsityError {
    #[error("hypergraph is not {0}-uniform")]
    WrongUniformity(usize),
    #[error("search budget of {0} nodes exhausted")]
    BudgetExhausted(u64),
    #[error("brute-force enumeration needs {needed} subsets, cap is {cap}")]
    CapExceeded { needed: u128, cap: u128 },
}

/// A set of edge indices spanning too few vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violator {
    pub edges: Vec<usize>,
    pub spanned: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsityVerdict {
    pub holds: bool,
    /// False when the search stopped on its budget; `holds` is then false
    /// without a violator.
    pub complete: bool,
    pub violator: Option<Violator>,
    pub m: usize,
    pub s: usize,
}

impl SparsityVerdict {
    fn holds(m: usize, s: usize) -> Self {
        SparsityVerdict { holds: true, complete: true, violator: None, m, s }
    }

    fn violated(m: usize, s: usize, violator: Violator) -> Self {
        SparsityVerdict { holds: false, complete: true, violator: Some(violator), m, s }
    }

    pub fn inconclusive(m: usize, s: usize) -> Self {
        SparsityVerdict { holds: false, complete: false, violator: None, m, s }
    }
}

fn spanned(h: &Hypergraph, f: &[usize]) -> usize {
    let mut seen = vec![false; h.n()];
    let mut count = 0;
    for &i in f {
        for &v in &h.edges()[i] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
            }
        }
    }
    count
}

/// `|∪F| - (s-1)|F|`.
pub fn excess(h: &Hypergraph, f: &[usize], s: usize) -> i64 {
    spanned(h, f) as i64 - (s as i64 - 1) * f.len() as i64
}

/// Connected-set enumeration (ESU) rooted at one start edge with a size cap.
struct Enumerator<'a> {
    h: &'a Hypergraph,
    incident: Vec<Vec<usize>>,
    s: i64,
    cap: usize,
    start: usize,
    /// How many chosen edges contain each vertex.
    multiplicity: Vec<u32>,
    stamp: Vec<u32>,
    stamp_now: u32,
    chosen: Vec<usize>,
    excess: i64,
    best: Option<Vec<usize>>,
    /// Some branch reached the cap or was cut by the excess bound.
    open: bool,
    nodes: u64,
    budget: u64,
}

impl<'a> Enumerator<'a> {
    fn new(h: &'a Hypergraph, s: usize, budget: u64) -> Self {
        Enumerator {
            h,
            incident: h.incidence(),
            s: s as i64,
            cap: 0,
            start: 0,
            multiplicity: vec![0; h.n()],
            stamp: vec![0; h.edge_count()],
            stamp_now: 0,
            chosen: Vec::new(),
            excess: 0,
            best: None,
            open: false,
            nodes: 0,
            budget,
        }
    }

    fn add(&mut self, e: usize) {
        let mut overlap = 0;
        for &v in &self.h.edges()[e] {
            if self.multiplicity[v] > 0 {
                overlap += 1;
            }
            self.multiplicity[v] += 1;
        }
        self.excess += 1 - overlap;
        self.chosen.push(e);
    }

    fn remove(&mut self, e: usize) {
        self.chosen.pop();
        let mut overlap = 0;
        for &v in &self.h.edges()[e] {
            self.multiplicity[v] -= 1;
            if self.multiplicity[v] > 0 {
                overlap += 1;
            }
        }
        self.excess -= 1 - overlap;
    }

    /// Edges meeting `w` but not the current union, with index above the start.
    fn exclusive_neighbors(&mut self, w: usize, out: &mut Vec<usize>) {
        self.stamp_now = self.stamp_now.wrapping_add(1);
        if self.stamp_now == 0 {
            self.stamp.fill(0);
            self.stamp_now = 1;
        }
        let now = self.stamp_now;
        for &u in &self.h.edges()[w] {
            if self.multiplicity[u] > 0 {
                continue;
            }
            for &f in &self.incident[u] {
                if f <= self.start || f == w || self.stamp[f] == now {
                    continue;
                }
                self.stamp[f] = now;
                if self.h.edges()[f].iter().all(|&x| self.multiplicity[x] == 0) {
                    out.push(f);
                }
            }
        }
    }

    fn extend(&mut self, mut frontier: Vec<usize>) -> Result<(), SparsityError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(SparsityError::BudgetExhausted(self.budget));
        }
        let len = self.chosen.len();
        if len == self.cap {
            self.open = true;
            if self.excess <= -1 {
                let mut f = self.chosen.clone();
                f.sort_unstable();
                if self.best.as_ref().is_none_or(|b| f < *b) {
                    self.best = Some(f);
                }
            }
            return Ok(());
        }
        // each further edge lowers the excess by at most s - 1
        if self.excess - (self.cap - len) as i64 * (self.s - 1) > -1 {
            self.open = true;
            return Ok(());
        }
        while let Some(w) = frontier.pop() {
            let mut next = frontier.clone();
            if len + 1 < self.cap {
                self.exclusive_neighbors(w, &mut next);
            }
            self.add(w);
            let res = self.extend(next);
            self.remove(w);
            res?;
        }
        Ok(())
    }

    /// Lexicographically smallest violator of exactly `cap` edges whose
    /// smallest index is `start`.
    fn run(&mut self, start: usize, cap: usize) -> Result<Option<Vec<usize>>, SparsityError> {
        self.start = start;
        self.cap = cap;
        self.best = None;
        let mut frontier = Vec::new();
        if cap > 1 {
            self.exclusive_neighbors(start, &mut frontier);
        }
        self.add(start);
        let res = self.extend(frontier);
        self.remove(start);
        res?;
        Ok(self.best.take())
    }
}

/// Exact bounded-sparsity check with an unbounded search budget.
pub fn check_sparsity(h: &Hypergraph, m: usize, s: usize) -> Result<SparsityVerdict, SparsityError> {
    check_sparsity_with_budget(h, m, s, u64::MAX)
}

/// As [`check_sparsity`], but stops with [`SparsityError::BudgetExhausted`]
/// after `budget` search nodes. Sets of each size are searched to completion
/// before larger sizes, so a reported violator is always of minimum
/// cardinality and, among those, lexicographically smallest.
pub fn check_sparsity_with_budget(
    h: &Hypergraph,
    m: usize,
    s: usize,
    budget: u64,
) -> Result<SparsityVerdict, SparsityError> {
    if !h.is_uniform(s) {
        return Err(SparsityError::WrongUniformity(s));
    }
    let mut en = Enumerator::new(h, s, budget);
    for size in 1..=m.min(h.edge_count()) {
        en.open = false;
        for start in 0..h.edge_count() {
            if let Some(edges) = en.run(start, size)? {
                let spanned = spanned(h, &edges);
                return Ok(SparsityVerdict::violated(m, s, Violator { edges, spanned }));
            }
        }
        if !en.open {
            // no connected edge set of this size exists, so none larger either
            break;
        }
    }
    Ok(SparsityVerdict::holds(m, s))
}

pub const DEFAULT_BRUTE_FORCE_CAP: u128 = 1 << 24;

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Ground truth by enumerating every edge subset of size `1..=m`, smallest
/// first and lexicographically within a size, so the reported violator
/// follows the same rule as [`check_sparsity`].
pub fn brute_force_sparsity(
    h: &Hypergraph,
    m: usize,
    s: usize,
    cap: u128,
) -> Result<SparsityVerdict, SparsityError> {
    if !h.is_uniform(s) {
        return Err(SparsityError::WrongUniformity(s));
    }
    let e = h.edge_count();
    let top = m.min(e);
    let needed: u128 = (1..=top).map(|k| binomial(e, k)).sum();
    if needed > cap {
        return Err(SparsityError::CapExceeded { needed, cap });
    }
    for size in 1..=top {
        for f in (0..e).combinations(size) {
            let span = spanned(h, &f);
            if (span as i64) < (s as i64 - 1) * size as i64 {
                return Ok(SparsityVerdict::violated(m, s, Violator { edges: f, spanned: span }));
            }
        }
    }
    Ok(SparsityVerdict::holds(m, s))
}

/// True when `f` violates and no proper non-empty subset does.
pub fn is_minimal_violator(h: &Hypergraph, f: &[usize], s: usize) -> bool {
    if excess(h, f, s) > -1 {
        return false;
    }
    (1..f.len()).all(|k| f.iter().copied().combinations(k).all(|sub| excess(h, &sub, s) > -1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hg(n: usize, edges: &[&[usize]]) -> Hypergraph {
        Hypergraph::new(n, edges.iter().map(|e| e.to_vec()).collect()).unwrap()
    }

    #[test]
    fn excess_examples() {
        let h = hg(6, &[&[0, 1, 2], &[3, 4, 5]]);
        assert_eq!(excess(&h, &[0], 3), 1);
        assert_eq!(excess(&h, &[0, 1], 3), 2);
        let k = hg(4, &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3]]);
        assert_eq!(excess(&k, &[0, 1, 2], 3), -2);
    }

    #[test]
    fn check_examples() {
        let empty = check_sparsity(&Hypergraph::empty(5), 8, 3).unwrap();
        assert!(empty.holds);
        let disjoint = hg(9, &[&[0, 1, 2], &[3, 4, 5], &[6, 7, 8]]);
        assert!(check_sparsity(&disjoint, 8, 3).unwrap().holds);

        let k = hg(5, &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[2, 3, 4]]);
        let v = check_sparsity(&k, 3, 3).unwrap();
        assert!(!v.holds && v.complete);
        let viol = v.violator.unwrap();
        // {012, 013, 023} spans 4 < 6; no pair violates (pairs span >= 4)
        assert_eq!(viol.edges, vec![0, 1, 2]);
        assert_eq!(viol.spanned, 4);
        assert!(is_minimal_violator(&k, &viol.edges, 3));
        assert_eq!(brute_force_sparsity(&k, 3, 3, DEFAULT_BRUTE_FORCE_CAP).unwrap(), check_sparsity(&k, 3, 3).unwrap());
    }

    #[test]
    fn window_limits_the_search() {
        let k = hg(4, &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3]]);
        assert!(check_sparsity(&k, 2, 3).unwrap().holds);
        assert!(!check_sparsity(&k, 3, 3).unwrap().holds);
    }

    #[test]
    fn brute_force_examples() {
        let single = hg(3, &[&[0, 1, 2]]);
        assert!(brute_force_sparsity(&single, 5, 3, 100).unwrap().holds);
        let k4 = Hypergraph::complete(4, 3);
        let v = brute_force_sparsity(&k4, 4, 3, 100).unwrap();
        assert!(!v.holds);
        assert_eq!(v.violator.unwrap().edges, vec![0, 1, 2]);
        assert_eq!(excess(&k4, &[0, 1, 2, 3], 3), -4);
        assert!(matches!(
            brute_force_sparsity(&Hypergraph::complete(9, 3), 84, 3, 1000),
            Err(SparsityError::CapExceeded { .. })
        ));
    }

    #[test]
    fn budget_is_reported() {
        let h = Hypergraph::complete(9, 3);
        assert_eq!(
            check_sparsity_with_budget(&h, 40, 3, 3),
            Err(SparsityError::BudgetExhausted(3))
        );
    }

    #[test]
    fn pair_violation_in_four_uniform() {
        // two 4-edges sharing three vertices span 5 < 6
        let h = hg(8, &[&[0, 1, 2, 3], &[0, 1, 2, 4], &[4, 5, 6, 7]]);
        let v = check_sparsity(&h, 32, 4).unwrap();
        assert_eq!(v.violator.unwrap(), Violator { edges: vec![0, 1], spanned: 5 });
    }

    #[test]
    fn long_cycle_plus_chord_is_found() {
        // a loose cycle of 3-edges has excess 0; a chord edge closing a second cycle violates
        let h = hg(
            9,
            &[&[0, 1, 2], &[2, 3, 4], &[4, 5, 6], &[6, 7, 0], &[1, 5, 8]],
        );
        let v = check_sparsity(&h, 16, 3).unwrap();
        assert!(!v.holds);
        let viol = v.violator.unwrap();
        assert!(is_minimal_violator(&h, &viol.edges, 3));
        assert_eq!(
            brute_force_sparsity(&h, 16, 3, DEFAULT_BRUTE_FORCE_CAP).unwrap().violator.unwrap(),
            viol
        );
    }
}
