mod common;

use std::collections::BTreeMap;

use localexpert::centrality::{
    argmax_candidate, betweenness, closeness, degree, pagerank, CentralityMethod, ScoreMap,
    DEFAULT_DAMPING, DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE,
};
use localexpert::graph::{build_global_graph, highest_degree_component};
use localexpert::{Mode, ReviewerGraph};
use proptest::prelude::*;

fn arb_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1usize..12).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..30)))
}

fn build(n: usize, edges: &[(usize, usize)], name: impl Fn(usize) -> String) -> ReviewerGraph {
    ReviewerGraph::from_edges(
        (0..n).map(&name).collect::<Vec<_>>(),
        edges.iter().map(|&(a, b)| (name(a), name(b))).collect::<Vec<_>>(),
        Vec::<String>::new(),
        Mode::Global,
    )
}

fn default_pagerank(graph: &ReviewerGraph) -> ScoreMap {
    pagerank(graph, DEFAULT_DAMPING, DEFAULT_TOLERANCE, DEFAULT_MAX_ITERATIONS).unwrap()
}

#[test]
fn five_node_pagerank_against_dense_iteration() {
    // A triangle with a two-node tail and nothing else.
    let edges = [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)];
    let graph = build(5, &edges, |i| format!("v{i}"));
    let scores = default_pagerank(&graph);

    let n = 5;
    let mut adj = vec![vec![0.0; n]; n];
    for &(a, b) in &edges {
        adj[a][b] = 1.0;
        adj[b][a] = 1.0;
    }
    let deg: Vec<f64> = adj.iter().map(|r| r.iter().sum()).collect();
    let mut x = vec![1.0 / n as f64; n];
    for _ in 0..5000 {
        let mut next = vec![(1.0 - DEFAULT_DAMPING) / n as f64; n];
        for i in 0..n {
            for j in 0..n {
                if adj[j][i] > 0.0 {
                    next[i] += DEFAULT_DAMPING * x[j] / deg[j];
                }
            }
        }
        x = next;
    }
    for (i, expected) in x.iter().enumerate() {
        assert!((scores.get(&format!("v{i}")).unwrap() - expected).abs() < 1e-8);
    }
}

#[test]
fn complete_graph_has_no_brokers() {
    let edges: Vec<(usize, usize)> = (0..4).flat_map(|a| (a + 1..4).map(move |b| (a, b))).collect();
    let graph = build(4, &edges, |i| i.to_string());
    assert!(betweenness(&graph).unwrap().scores.values().all(|&s| s == 0.0));
    assert!(closeness(&graph).unwrap().scores.values().all(|&s| s == 1.0));
}

#[test]
fn fixture_methods_are_repeatable() {
    let ds = common::fixture();
    let graph = highest_degree_component(&build_global_graph(&ds, &common::mall_query(5)));
    for method in CentralityMethod::ALL {
        let first = method.score(&graph).unwrap();
        assert_eq!(first, method.score(&graph).unwrap());
        assert_eq!(first.len(), graph.len());
        let top = argmax_candidate(&first, &ds, &common::mall_query(5)).unwrap();
        assert!(top.is_candidate);
    }
}

proptest! {
    #[test]
    fn pagerank_ignores_labels((n, edges) in arb_graph(), shift in 1usize..50) {
        let a = default_pagerank(&build(n, &edges, |i| format!("n{i:02}")));
        // Relabelling reverses and shifts the id order, so node indices change.
        let b = default_pagerank(&build(n, &edges, |i| format!("m{:03}", 999 - i - shift)));
        let total: f64 = a.scores.values().sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        for i in 0..n {
            let x = a.get(&format!("n{i:02}")).unwrap();
            let y = b.get(&format!("m{:03}", 999 - i - shift)).unwrap();
            prop_assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn scores_are_in_range((n, edges) in arb_graph()) {
        let graph = build(n, &edges, |i| format!("n{i:02}"));
        let pairs = (n * n.saturating_sub(1)) as f64 / 2.0;
        for &v in betweenness(&graph).unwrap().scores.values() {
            prop_assert!(v >= 0.0 && v <= pairs);
        }
        for &v in closeness(&graph).unwrap().scores.values() {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        let deg = degree(&graph);
        for (i, id) in graph.nodes().iter().enumerate() {
            prop_assert_eq!(deg.get(id).unwrap(), graph.neighbors(i).len() as f64);
        }
    }

    #[test]
    fn argmax_ignores_positive_scaling(values in prop::collection::vec(0.0f64..10.0, 1..10), exponent in -20i32..20) {
        // Powers of two scale exactly, so no ties appear or vanish.
        let factor = 2f64.powi(exponent);
        let ds = common::fixture();
        let query = common::mall_query(5);
        let ids = ["j1", "loner", "u01", "u02", "u03", "u05", "u30", "m1", "m2", "u11"];
        let map = |scale: f64| ScoreMap {
            method: CentralityMethod::Degree,
            scores: ids.iter().zip(&values).map(|(id, v)| (id.to_string(), v * scale)).collect::<BTreeMap<_, _>>(),
        };
        let a = argmax_candidate(&map(1.0), &ds, &query).unwrap();
        let b = argmax_candidate(&map(factor), &ds, &query).unwrap();
        prop_assert_eq!(a.node, b.node);
        prop_assert_eq!(a.is_candidate, b.is_candidate);
    }
}
