use critgraph_core::hypergraph::{Graph, Hypergraph};
use critgraph_core::params::{derive_params, Seed};
use critgraph_core::sampler::sample_hypergraph;
use proptest::prelude::*;

/// Arbitrary hypergraph on at most `max_n` vertices with edges of size 1..=4.
fn hypergraph(max_n: usize) -> impl Strategy<Value = Hypergraph> {
    (1..=max_n).prop_flat_map(|n| {
        let edge = proptest::collection::btree_set(0..n, 1..=4.min(n));
        proptest::collection::btree_set(edge, 0..10).prop_map(move |set| {
            Hypergraph::new(n, set.into_iter().map(|e| e.into_iter().collect()).collect()).unwrap()
        })
    })
}

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..3 * n).prop_map(move |pairs| {
            Graph::from_edges(n, pairs.into_iter().filter(|(u, v)| u != v)).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn restriction_commutes_with_two_section(h in hypergraph(8), mask in any::<u8>()) {
        let keep: Vec<usize> = (0..h.n()).filter(|v| mask >> v & 1 == 1).collect();
        let (restricted, map) = h.restrict(&keep).unwrap();
        let (induced, map2) = h.two_section().induced(&keep).unwrap();
        prop_assert_eq!(map.kept(), map2.kept());
        prop_assert_eq!(restricted.two_section(), induced);
    }

    #[test]
    fn complement_is_an_involution(g in graph(10)) {
        prop_assert_eq!(g.complement().complement(), g.clone());
        prop_assert_eq!(g.edge_count() + g.complement().edge_count(), g.n() * (g.n() - 1) / 2);
    }

    #[test]
    fn uniform_edges_induce_cliques(n in 4usize..12, p in 0.0f64..0.4, seed in any::<u64>()) {
        let h = sample_hypergraph(n, 4, p, Seed(seed)).unwrap();
        let g = h.two_section();
        for e in h.edges() {
            prop_assert_eq!(g.edges_within(e), 6);
        }
    }

    #[test]
    fn vertex_deletion_only_loses_edges(h in hypergraph(8), pick in any::<usize>()) {
        let v = pick % h.n();
        let (smaller, map) = h.delete_vertex(v).unwrap();
        let (expected_super, map2) = h.two_section().delete_vertices(&[v]).unwrap();
        prop_assert_eq!(map.kept(), map2.kept());
        let sub = smaller.two_section();
        for (a, b) in sub.edges() {
            prop_assert!(expected_super.has_edge(a, b));
        }
        let survive = smaller.edges().iter().all(|e| {
            let old: Vec<usize> = e.iter().map(|&x| map.to_old(x)).collect();
            h.contains_edge(&old)
        });
        prop_assert!(survive);
        prop_assert_eq!(smaller.edge_count(), h.edges().iter().filter(|e| !e.contains(&v)).count());
    }

    #[test]
    fn components_partition_the_vertices(g in graph(12)) {
        let comps = g.components();
        let mut all: Vec<usize> = comps.iter().flatten().copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..g.n()).collect::<Vec<_>>());
        prop_assert!(comps.windows(2).all(|w| w[0][0] < w[1][0]));
        for (u, v) in g.edges() {
            prop_assert!(comps.iter().any(|c| c.contains(&u) && c.contains(&v)));
        }
    }

    #[test]
    fn derived_params_satisfy_invariants(r in 1usize..6, k in 2usize..200, c in 0.1f64..100.0) {
        let p = derive_params(r, k, c).unwrap();
        prop_assert_eq!(p.s, r + 3);
        prop_assert_eq!(p.m, 1 << (p.s + 1));
        prop_assert_eq!(p.n % p.s, 1);
        prop_assert!(p.q >= p.p && p.q <= 1.0);
        prop_assert!((1u128 << p.l) >= (p.n as u128).pow(2));
        prop_assert!((1u128 << (p.l - 1)) < (p.n as u128).pow(2));
    }

    #[test]
    fn samples_are_canonical_and_reproducible(n in 4usize..15, s in 2usize..5, p in 0.0f64..1.0, seed in any::<u64>()) {
        prop_assume!(s <= n);
        let a = sample_hypergraph(n, s, p, Seed(seed)).unwrap();
        let b = sample_hypergraph(n, s, p, Seed(seed)).unwrap();
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        prop_assert!(a.edges().windows(2).all(|w| w[0] < w[1]));
        prop_assert!(a.is_uniform(s) || a.edge_count() == 0);
        let reparsed: Hypergraph = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        prop_assert_eq!(reparsed, a);
    }
}

#[test]
fn json_rejects_malformed_hypergraphs() {
    for bad in [
        r#"{"n":3,"edges":[[0,3]]}"#,
        r#"{"n":3,"edges":[[0,1],[1,0]]}"#,
        r#"{"n":3,"edges":[[]]}"#,
        r#"{"n":3,"edges":[[1,1]]}"#,
    ] {
        assert!(serde_json::from_str::<Hypergraph>(bad).is_err(), "{bad}");
    }
}
