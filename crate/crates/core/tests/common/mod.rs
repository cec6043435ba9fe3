//! Independent oracles and fixtures shared by the integration tests. Nothing
//! here calls into the library's modularity, Louvain or centrality code.

#![allow(dead_code, clippy::needless_range_loop)]

use cointerest::{InterestRecord, WeightedGraph};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn graph_from(n: usize, edges: &[(usize, usize, f64)]) -> WeightedGraph {
    let mut g = WeightedGraph::new();
    for i in 0..n {
        g.add_node(&format!("n{i}")).unwrap();
    }
    for &(a, b, w) in edges {
        g.add_edge_between(a, b, w).unwrap();
    }
    g
}

pub fn clique_edges(nodes: &[usize]) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for (i, &a) in nodes.iter().enumerate() {
        for &b in &nodes[i + 1..] {
            out.push((a, b, 1.0));
        }
    }
    out
}

pub fn clique(n: usize) -> WeightedGraph {
    graph_from(n, &clique_edges(&(0..n).collect::<Vec<_>>()))
}

pub fn two_triangles() -> WeightedGraph {
    let mut edges = clique_edges(&[0, 1, 2]);
    edges.extend(clique_edges(&[3, 4, 5]));
    graph_from(6, &edges)
}

pub fn bridged_cliques() -> WeightedGraph {
    let mut edges = clique_edges(&[0, 1, 2, 3]);
    edges.extend(clique_edges(&[4, 5, 6, 7]));
    edges.push((3, 4, 1.0));
    graph_from(8, &edges)
}

/// Erdős–Rényi graph with weights uniform in (0, 1]; retried until it has an edge.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> WeightedGraph {
    loop {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                if rng.random::<f64>() < p {
                    edges.push((a, b, 1.0 - rng.random::<f64>()));
                }
            }
        }
        if !edges.is_empty() {
            return graph_from(n, &edges);
        }
    }
}

/// Random spanning tree plus extra edges with probability `p`.
pub fn random_connected_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> WeightedGraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut present = vec![vec![false; n]; n];
    let mut edges = Vec::new();
    for i in 1..n {
        let parent = order[rng.random_range(0..i)];
        let child = order[i];
        present[parent][child] = true;
        present[child][parent] = true;
        edges.push((parent, child, 1.0 - rng.random::<f64>()));
    }
    for a in 0..n {
        for b in (a + 1)..n {
            if !present[a][b] && rng.random::<f64>() < p {
                edges.push((a, b, 1.0 - rng.random::<f64>()));
            }
        }
    }
    graph_from(n, &edges)
}

/// Dense symmetric adjacency with `A_ii = 2w` for self-loops (modularity convention).
pub fn modularity_matrix_entries(g: &WeightedGraph) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if let Some(w) = g.weight_between(i, j) {
                a[i][j] = if i == j { 2.0 * w } else { w };
            }
        }
    }
    a
}

/// Term-by-term ordered-pair evaluation of the modularity double sum.
pub fn dense_modularity(g: &WeightedGraph, labels: &[usize], gamma: f64) -> f64 {
    let a = modularity_matrix_entries(g);
    let n = a.len();
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += a[i][j] - gamma * k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Every set partition of `0..n` as a restricted growth string.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let limit = if prefix.is_empty() { 0 } else { max + 1 };
        for c in 0..=limit {
            prefix.push(c);
            extend(prefix, max.max(c), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
    } else {
        extend(&mut Vec::new(), 0, n, &mut out);
    }
    out
}

/// Best modularity over all partitions, with the first partition attaining it.
pub fn brute_force_optimum(g: &WeightedGraph, gamma: f64) -> (f64, Vec<usize>) {
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for labels in all_partitions(g.node_count()) {
        let q = dense_modularity(g, &labels, gamma);
        if q > best.0 {
            best = (q, labels);
        }
    }
    best
}

/// Dominant eigenpair of the weighted adjacency (`A_ii = w`), via a dense
/// symmetric eigendecomposition. The vector is unit-norm with positive sum.
pub fn dense_dominant_eigenvector(g: &WeightedGraph) -> (f64, Vec<f64>) {
    let n = g.node_count();
    let m = DMatrix::from_fn(n, n, |i, j| g.weight_between(i, j).unwrap_or(0.0));
    let eig = SymmetricEigen::new(m);
    let (idx, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let col = eig.eigenvectors.column(idx);
    let sign = if col.sum() < 0.0 { -1.0 } else { 1.0 };
    let norm = col.norm();
    (lambda, col.iter().map(|v| sign * v / norm).collect())
}

/// Deterministic stand-in for a country/topic dataset: 172 entities in
/// groups of four sharing a topic, plus random 2–3 entity topics until about
/// 520 co-interest pairs exist.
pub fn synthetic_records(seed: u64) -> Vec<InterestRecord> {
    let mut rng = rng(seed);
    let n = 172;
    let names: Vec<String> = (0..n).map(|i| format!("Entity {i:03}")).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut pairs = std::collections::HashSet::new();
    let mut records = Vec::new();
    let mut topic = 0;
    let mut add_topic = |members: &[usize], rng: &mut ChaCha8Rng, pairs: &mut std::collections::HashSet<(usize, usize)>| {
        for &m in members {
            records.push(InterestRecord::new(&names[m], &format!("topic {topic}"), rng.random_range(1..=20)));
        }
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                pairs.insert((a.min(b), a.max(b)));
            }
        }
        topic += 1;
    };
    for group in order.chunks(4) {
        add_topic(group, &mut rng, &mut pairs);
    }
    while pairs.len() < 519 {
        let size = rng.random_range(2..=3);
        let members: Vec<usize> = (0..n).collect::<Vec<_>>().choose_multiple(&mut rng, size).copied().collect();
        add_topic(&members, &mut rng, &mut pairs);
    }
    records
}

pub fn records_csv(records: &[InterestRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["country", "topic", "frequency"]).unwrap();
    for r in records {
        w.write_record([r.entity.as_str(), r.topic.as_str(), &r.frequency.to_string()]).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}
