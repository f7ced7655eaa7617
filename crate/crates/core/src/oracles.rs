//! Exact independence and chromatic numbers for small graphs, used to
//! cross-check certified bounds. Both work on single-word bitsets, so graphs
//! above 64 vertices are always rejected.

use thiserror::Error;

use crate::hypergraph::Graph;

pub const DEFAULT_INDEPENDENCE_CAP: usize = 60;
pub const DEFAULT_CHROMATIC_CAP: usize = 45;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("graph has {n} vertices, oracle cap is {cap}")]
    CapExceeded { n: usize, cap: usize },
}

fn check_cap(g: &Graph, cap: usize) -> Result<(), OracleError> {
    let cap = cap.min(64);
    if g.n() > cap {
        return Err(OracleError::CapExceeded { n: g.n(), cap });
    }
    Ok(())
}

fn rows(g: &Graph) -> Vec<u64> {
    (0..g.n())
        .map(|v| g.neighbors(v).iter().fold(0u64, |acc, &u| acc | 1 << u))
        .collect()
}

fn complement_rows(g: &Graph) -> Vec<u64> {
    let full = if g.n() == 64 { u64::MAX } else { (1u64 << g.n()) - 1 };
    rows(g)
        .into_iter()
        .enumerate()
        .map(|(v, r)| !r & full & !(1 << v))
        .collect()
}

/// Branch and bound for a maximum clique; greedy coloring of the candidates
/// bounds how much a branch can still add.
fn max_clique(adj: &[u64]) -> usize {
    fn expand(adj: &[u64], mut cand: u64, size: usize, best: &mut usize) {
        if cand == 0 {
            *best = (*best).max(size);
            return;
        }
        let mut order = Vec::with_capacity(cand.count_ones() as usize);
        let mut uncolored = cand;
        let mut color = 0;
        while uncolored != 0 {
            color += 1;
            let mut q = uncolored;
            while q != 0 {
                let v = q.trailing_zeros() as usize;
                q &= !(1 << v) & !adj[v];
                uncolored &= !(1 << v);
                order.push((v, color));
            }
        }
        for &(v, color) in order.iter().rev() {
            if size + color <= *best {
                return;
            }
            expand(adj, cand & adj[v], size + 1, best);
            cand &= !(1 << v);
        }
    }
    let mut best = 0;
    let all = adj.iter().enumerate().fold(0u64, |acc, (v, _)| acc | 1 << v);
    expand(adj, all, 0, &mut best);
    best
}

/// Largest independent set size; the search is a maximum clique search on
/// the complement, whose greedy colorings are clique covers of `G`.
pub fn exact_independence(g: &Graph, cap: usize) -> Result<usize, OracleError> {
    check_cap(g, cap)?;
    Ok(max_clique(&complement_rows(g)))
}

pub fn clique_number(g: &Graph, cap: usize) -> Result<usize, OracleError> {
    check_cap(g, cap)?;
    Ok(max_clique(&rows(g)))
}

struct Coloring<'a> {
    adj: &'a [u64],
    color: Vec<Option<usize>>,
    /// `seen[v][c]`: neighbors of `v` currently holding color `c`.
    seen: Vec<Vec<u32>>,
    saturation: Vec<usize>,
}

impl<'a> Coloring<'a> {
    fn new(adj: &'a [u64], k: usize) -> Self {
        let n = adj.len();
        Coloring { adj, color: vec![None; n], seen: vec![vec![0; k]; n], saturation: vec![0; n] }
    }

    fn set(&mut self, v: usize, c: usize) {
        self.color[v] = Some(c);
        let mut nb = self.adj[v];
        while nb != 0 {
            let u = nb.trailing_zeros() as usize;
            nb &= nb - 1;
            if self.seen[u][c] == 0 {
                self.saturation[u] += 1;
            }
            self.seen[u][c] += 1;
        }
    }

    fn unset(&mut self, v: usize, c: usize) {
        self.color[v] = None;
        let mut nb = self.adj[v];
        while nb != 0 {
            let u = nb.trailing_zeros() as usize;
            nb &= nb - 1;
            self.seen[u][c] -= 1;
            if self.seen[u][c] == 0 {
                self.saturation[u] -= 1;
            }
        }
    }

    /// Uncolored vertex of highest saturation, then highest degree, then lowest id.
    fn pick(&self) -> Option<usize> {
        (0..self.adj.len())
            .filter(|&v| self.color[v].is_none())
            .max_by_key(|&v| (self.saturation[v], self.adj[v].count_ones(), std::cmp::Reverse(v)))
    }

    fn solve(&mut self, k: usize, used: usize) -> bool {
        let Some(v) = self.pick() else {
            return true;
        };
        // a fresh color is interchangeable with any other unused one
        for c in 0..k.min(used + 1) {
            if self.seen[v][c] == 0 {
                self.set(v, c);
                let ok = self.solve(k, used.max(c + 1));
                if ok {
                    return true;
                }
                self.unset(v, c);
            }
        }
        false
    }
}

fn dsatur_greedy(adj: &[u64]) -> usize {
    let n = adj.len();
    let mut c = Coloring::new(adj, n.max(1));
    let mut used = 0;
    while let Some(v) = c.pick() {
        let col = (0..n).find(|&col| c.seen[v][col] == 0).expect("n colors always suffice");
        c.set(v, col);
        used = used.max(col + 1);
    }
    used
}

/// Whether `G` admits a proper coloring with `k` colors (exact backtracking).
pub fn is_colorable(g: &Graph, k: usize, cap: usize) -> Result<bool, OracleError> {
    check_cap(g, cap)?;
    let adj = rows(g);
    if g.n() == 0 {
        return Ok(true);
    }
    if k == 0 {
        return Ok(false);
    }
    Ok(Coloring::new(&adj, k).solve(k, 0))
}

/// Exact chromatic number. Bounds: clique number and `ceil(n / alpha)` below,
/// a DSATUR coloring above; each value in between is decided exactly.
pub fn exact_chromatic(g: &Graph, cap: usize) -> Result<usize, OracleError> {
    check_cap(g, cap)?;
    let n = g.n();
    if n == 0 {
        return Ok(0);
    }
    let adj = rows(g);
    let alpha = max_clique(&complement_rows(g));
    let lower = max_clique(&adj).max(n.div_ceil(alpha));
    let upper = dsatur_greedy(&adj);
    for k in lower..upper {
        if Coloring::new(&adj, k).solve(k, 0) {
            return Ok(k);
        }
    }
    Ok(upper)
}

/// Whether `colors` is a proper coloring of `G` restricted to colored vertices.
pub fn is_proper_partial(g: &Graph, colors: &[Option<usize>]) -> bool {
    g.edges().all(|(u, v)| match (colors[u], colors[v]) {
        (Some(a), Some(b)) => a != b,
        _ => true,
    })
}

/// The Petersen graph: outer 5-cycle, inner pentagram, spokes.
pub fn petersen() -> Graph {
    let edges = (0..5).flat_map(|i| [(i, (i + 1) % 5), (i, i + 5), (5 + i, 5 + (i + 2) % 5)]);
    Graph::from_edges(10, edges).expect("valid Petersen graph")
}
