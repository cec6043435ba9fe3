//! Library behaviour checked against brute-force and dense-linear-algebra oracles.

mod common;

use cointerest::export::{export_graph, read_graph_json, GraphFormat};
use cointerest::louvain::{move_nodes, reduce_clusters, single_partition};
use cointerest::modularity::{delta_move, modularity, MoveTarget, Partition, ResolutionParams};
use cointerest::{eigenvector_centrality, louvain, LouvainConfig};
use common::*;
use proptest::prelude::*;
use rand::Rng;

fn unit() -> ResolutionParams {
    ResolutionParams::default()
}

#[test]
fn partition_counts_are_bell_numbers() {
    let bell = [1, 1, 2, 5, 15, 52, 203, 877, 4140];
    for (n, &b) in bell.iter().enumerate() {
        assert_eq!(all_partitions(n).len(), b);
    }
}

#[test]
fn dense_oracle_matches_hand_values() {
    let mut g = cointerest::WeightedGraph::new();
    g.add_edge("a", "b", 1.0).unwrap();
    assert_eq!(dense_modularity(&g, &[0, 0], 1.0), 0.0);
    assert_eq!(dense_modularity(&g, &[0, 1], 1.0), -0.5);
    assert_eq!(dense_modularity(&g, &[0, 0], 2.0), -1.0);
}

#[test]
fn triangles_optimum_is_reached_by_local_moves() {
    let g = two_triangles();
    let (q_opt, best) = brute_force_optimum(&g, 1.0);
    assert!((q_opt - 0.5).abs() < 1e-15);
    assert_eq!(best, vec![0, 0, 0, 1, 1, 1]);
    let p = move_nodes(&g, &single_partition(&g), &LouvainConfig::default()).unwrap();
    assert_eq!(p.canonical().assignment(), best.as_slice());
}

#[test]
fn louvain_finds_bridged_cliques() {
    let g = bridged_cliques();
    let (q_opt, best) = brute_force_optimum(&g, 1.0);
    assert_eq!(best, vec![0, 0, 0, 0, 1, 1, 1, 1]);
    for seed in 0..25 {
        let r = louvain(&g, &LouvainConfig::new(unit(), seed)).unwrap();
        assert_eq!(r.partition.assignment(), best.as_slice(), "seed {seed}");
        assert!((r.modularity - q_opt).abs() <= 1e-12);
    }
}

#[test]
fn louvain_never_beats_brute_force() {
    let mut rng = rng(11);
    for _ in 0..60 {
        let n = rng.random_range(2..=7);
        let g = random_graph(&mut rng, n, 0.5);
        let gamma = rng.random_range(0.2..2.0);
        let (q_opt, _) = brute_force_optimum(&g, gamma);
        let r = louvain(&g, &LouvainConfig::new(ResolutionParams::new(gamma).unwrap(), rng.random())).unwrap();
        assert!(r.modularity <= q_opt + 1e-12);
        let oracle = dense_modularity(&g, r.partition.assignment(), gamma);
        assert!((r.modularity - oracle).abs() <= 1e-9);
    }
}

#[test]
fn louvain_history_is_monotone_on_random_graphs() {
    let mut rng = rng(12);
    for _ in 0..50 {
        let n = rng.random_range(5..=30);
        let g = random_graph(&mut rng, n, 0.2);
        let r = louvain(&g, &LouvainConfig::new(unit(), rng.random())).unwrap();
        for w in r.history.windows(2) {
            assert!(w[1] - w[0] >= -1e-12, "{:?}", r.history);
        }
        // output covers every node with dense ids
        assert_eq!(r.partition.len(), n);
        let mut used = vec![false; r.cluster_count()];
        r.partition.assignment().iter().for_each(|&c| used[c] = true);
        assert!(used.into_iter().all(|u| u));
    }
}

#[test]
fn louvain_is_deterministic_per_seed() {
    let mut rng = rng(13);
    let g = random_graph(&mut rng, 40, 0.15);
    let config = LouvainConfig::new(ResolutionParams::new(1.3).unwrap(), 99);
    let first = louvain(&g, &config).unwrap();
    for _ in 0..3 {
        let again = louvain(&g, &config).unwrap();
        assert_eq!(again.partition, first.partition);
        assert_eq!(again.modularity.to_bits(), first.modularity.to_bits());
        assert_eq!(again.levels, first.levels);
    }
}

#[test]
fn delta_move_matches_recompute() {
    let mut rng = rng(14);
    for _ in 0..300 {
        let n = rng.random_range(2..=12);
        let p_edge = rng.random_range(0.1..0.9);
        let g = random_graph(&mut rng, n, p_edge);
        let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        let p = Partition::from_labels(&labels);
        let v = rng.random_range(0..n);
        let gamma = rng.random_range(0.1..3.0);
        let (target, after) = if rng.random_bool(0.2) {
            let mut moved = p.assignment().to_vec();
            moved[v] = p.cluster_count();
            (MoveTarget::FreshSingleton, moved)
        } else {
            let c = rng.random_range(0..p.cluster_count());
            let mut moved = p.assignment().to_vec();
            moved[v] = c;
            (MoveTarget::Cluster(c), moved)
        };
        let d = delta_move(&g, &p, g.label(v), target, ResolutionParams::new(gamma).unwrap()).unwrap();
        let expected = dense_modularity(&g, &after, gamma) - dense_modularity(&g, p.assignment(), gamma);
        assert!((d - expected).abs() <= 1e-12, "{d} vs {expected}");
    }
}

#[test]
fn aggregation_preserves_modularity_and_weight() {
    let mut rng = rng(15);
    for _ in 0..100 {
        let n = rng.random_range(2..=15);
        let mut g = random_graph(&mut rng, n, 0.4);
        if rng.random_bool(0.3) {
            let v = rng.random_range(0..n);
            g.add_edge_between(v, v, 0.5).unwrap();
        }
        let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..4)).collect();
        let p = Partition::from_labels(&labels);
        let r = reduce_clusters(&g, &p).unwrap();
        assert_eq!(r.node_count(), p.cluster_count());
        assert!((r.total_weight() - g.total_weight()).abs() <= 1e-12);
        let q = modularity(&g, &p, unit()).unwrap();
        let qr = modularity(&r, &single_partition(&r), unit()).unwrap();
        assert!((q - qr).abs() <= 1e-12);
        assert!((dense_modularity(&g, &labels, 1.0) - dense_modularity(&r, &(0..r.node_count()).collect::<Vec<_>>(), 1.0)).abs() <= 1e-12);
    }
}

#[test]
fn path_closed_form_matches_dense_solver() {
    let g = graph_from(3, &[(0, 1, 1.0), (1, 2, 1.0)]);
    let (lambda, vector) = dense_dominant_eigenvector(&g);
    assert!((lambda - 2f64.sqrt()).abs() < 1e-12);
    let c = eigenvector_centrality(&g, 1e-10, 1000).unwrap();
    for (x, y) in c.scores.iter().zip(&vector) {
        assert!((x - y).abs() <= 1e-9);
    }
}

#[test]
fn centrality_matches_dense_solver_on_random_graphs() {
    let mut rng = rng(16);
    for _ in 0..100 {
        let n = rng.random_range(2..=6);
        let g = random_connected_graph(&mut rng, n, 0.5);
        let (lambda, vector) = dense_dominant_eigenvector(&g);
        let c = eigenvector_centrality(&g, 1e-10, 1000).unwrap();
        assert!((c.eigenvalue - lambda).abs() <= 1e-8);
        for (x, y) in c.scores.iter().zip(&vector) {
            assert!((x - y).abs() <= 1e-8);
        }
    }
}

#[test]
fn clique_resolution_threshold_matches_sweep() {
    // cluster count of K6 on a 1e-4 grid; the jump sits at 1.2
    let g = clique(6);
    let counts: Vec<(f64, usize)> = (1..=15000)
        .map(|i| {
            let gamma = i as f64 * 1e-4;
            let r = louvain(&g, &LouvainConfig::new(ResolutionParams::new(gamma).unwrap(), 0)).unwrap();
            (gamma, r.cluster_count())
        })
        .collect();
    let first_full = counts.iter().find(|(_, c)| *c == 6).unwrap().0;
    assert!((first_full - 1.2).abs() <= 1e-4 + 1e-12, "{first_full}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_export_round_trips(seed in any::<u64>(), n in 1usize..20) {
        let mut rng = rng(seed);
        let g = random_graph(&mut rng, n.max(2), 0.3);
        let json = export_graph(&g, &single_partition(&g), GraphFormat::Json).unwrap();
        let back = read_graph_json(&json).unwrap();
        prop_assert_eq!(back.nodes(), g.nodes());
        prop_assert_eq!(back.edge_count(), g.edge_count());
        for (a, b, w) in g.edges() {
            let w2 = back.weight(g.label(a), g.label(b)).unwrap();
            prop_assert!((w - w2).abs() <= 1e-12);
        }
    }
}
