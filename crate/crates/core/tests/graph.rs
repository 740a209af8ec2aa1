use std::collections::BTreeSet;

use proptest::prelude::*;
use tier_core::graph::{jaccard_weights, pagerank, parse_edge_list, write_edge_list, Orientation, PageRankParams};
use tier_core::Graph;

fn edge_list() -> impl Strategy<Value = Vec<(u16, u16)>> {
    prop::collection::vec((0u16..30, 0u16..30), 1..80)
}

fn random_graph() -> impl Strategy<Value = Graph> {
    (2usize..25)
        .prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..100)))
        .prop_map(|(n, pairs)| {
            let edges: Vec<_> = pairs.into_iter().filter(|(u, v)| u != v).map(|(u, v)| (u, v, 1.0)).collect();
            Graph::from_edges(n, &edges).unwrap()
        })
}

fn label_edges(g: &Graph) -> BTreeSet<(String, String)> {
    g.edges().map(|(u, v, _)| (g.label(u).to_owned(), g.label(v).to_owned())).collect()
}

proptest! {
    #[test]
    fn edge_list_round_trip(pairs in edge_list()) {
        let text: String = pairs.iter().map(|(u, v)| format!("n{u} n{v}\n")).collect();
        let expected: BTreeSet<_> = pairs
            .iter()
            .filter(|(u, v)| u != v)
            .map(|(u, v)| (format!("n{u}"), format!("n{v}")))
            .collect();
        let parsed = parse_edge_list(text.as_bytes(), Orientation::Directed);
        if expected.is_empty() {
            prop_assert!(parsed.is_err());
            return Ok(());
        }
        let g = parsed.unwrap();
        prop_assert_eq!(&label_edges(&g), &expected);
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let again = parse_edge_list(buf.as_slice(), Orientation::Directed).unwrap();
        prop_assert_eq!(label_edges(&again), expected);
    }

    #[test]
    fn jaccard_is_bounded_deterministic_idempotent(g in random_graph()) {
        let once = jaccard_weights(&g);
        prop_assert!(once.weights().iter().all(|w| (0.0..=1.0).contains(w)));
        let again = jaccard_weights(&g);
        prop_assert_eq!(once.weights(), again.weights());
        let twice = jaccard_weights(&once);
        prop_assert_eq!(twice.weights(), once.weights());
    }

    #[test]
    fn pagerank_is_permutation_equivariant(g in random_graph(), shift in 0usize..1000) {
        let n = g.node_count();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.rotate_left(shift % n);
        perm.swap(0, n - 1);
        let base = pagerank(&g, PageRankParams::default());
        let moved = pagerank(&g.permuted(&perm).unwrap(), PageRankParams::default());
        for u in 0..n {
            prop_assert!((base.scores[u] - moved.scores[perm[u]]).abs() < 1e-8);
        }
    }
}

#[test]
fn facebook_style_top_pagerank_degree() {
    // max-degree node of an undirected hub graph ranks first by in-degree
    let text = "1 2\n1 3\n1 4\n1 5\n2 3\n4 5\n";
    let g = parse_edge_list(text.as_bytes(), Orientation::Undirected).unwrap();
    let mut degree = vec![0usize; g.node_count()];
    for (u, _, _) in g.edges() {
        degree[u] += 1;
    }
    let top = tier_core::graph::in_degree_rank(&g)[0];
    assert_eq!(degree[top], *degree.iter().max().unwrap());
    assert_eq!(g.label(top), "1");
}
