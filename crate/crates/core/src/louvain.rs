//! Two-phase Louvain optimisation: greedy local moves followed by cluster
//! aggregation, repeated until a level produces no merge.
//!
//! Aggregation sums crossing weights into inter-cluster edges and internal
//! weights into self-loops, so `m` and `Q` are the same on every level. A
//! reduction that dropped weights or internal edges would change `Q` between
//! levels and make the "no merges" stopping test meaningless.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::WeightedGraph;
use crate::modularity::{self, gain, ModularityError, Partition, ResolutionParams};

/// Hard stop for pathological floating-point cycles within one level.
const MAX_SWEEPS: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LouvainError {
    #[error("cannot cluster an empty graph")]
    EmptyGraph,
    #[error("min_delta must be a non-negative finite number, got {0}")]
    InvalidMinDelta(f64),
    #[error(transparent)]
    Modularity(#[from] ModularityError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LouvainConfig {
    pub resolution: ResolutionParams,
    /// Seeds the node visiting order.
    pub seed: u64,
    /// A sweep must raise `Q` by more than this for another sweep to run.
    pub min_delta: f64,
}

impl LouvainConfig {
    pub fn new(resolution: ResolutionParams, seed: u64) -> Self {
        Self {
            resolution,
            seed,
            min_delta: 1e-12,
        }
    }

    pub fn with_min_delta(mut self, min_delta: f64) -> Result<Self, LouvainError> {
        if !(min_delta.is_finite() && min_delta >= 0.0) {
            return Err(LouvainError::InvalidMinDelta(min_delta));
        }
        self.min_delta = min_delta;
        Ok(self)
    }
}

impl Default for LouvainConfig {
    fn default() -> Self {
        Self::new(ResolutionParams::default(), 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringResult {
    /// Partition of the input graph's nodes, ids ordered by first member.
    pub partition: Partition,
    /// `Q` of `partition` at the configured resolution; NaN when degenerate.
    pub modularity: f64,
    /// Number of local-moving phases run.
    pub levels: usize,
    /// `Q` at the start and after every sweep, across all levels.
    pub history: Vec<f64>,
    /// Set when the graph has no weight and every node was left alone.
    pub degenerate: bool,
}

impl ClusteringResult {
    pub fn cluster_count(&self) -> usize {
        self.partition.cluster_count()
    }
}

/// Each node in its own cluster, ids in insertion order.
pub fn single_partition(graph: &WeightedGraph) -> Partition {
    Partition::singletons(graph.node_count())
}

/// Local-moving phase on its own, visiting nodes in an order shuffled from
/// `config.seed`.
pub fn move_nodes(
    graph: &WeightedGraph,
    partition: &Partition,
    config: &LouvainConfig,
) -> Result<Partition, LouvainError> {
    partition.check_covers(graph)?;
    if graph.total_weight() <= 0.0 {
        return Err(ModularityError::ZeroWeight.into());
    }
    let mut order: Vec<usize> = (0..graph.node_count()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
    let mut history = Vec::new();
    Ok(LocalMover::new(graph, partition, config.resolution.gamma()).run(&order, config.min_delta, &mut history))
}

/// Collapses every cluster into one node. Crossing weights become
/// inter-cluster edges; internal weights, original self-loops included,
/// become a self-loop on the cluster's node. Node `c` of the result is
/// labelled with the cluster id `c`.
pub fn reduce_clusters(graph: &WeightedGraph, partition: &Partition) -> Result<WeightedGraph, LouvainError> {
    partition.check_covers(graph)?;
    let mut reduced = WeightedGraph::new();
    for c in 0..partition.cluster_count() {
        reduced.add_node(&c.to_string()).expect("numeric label");
    }
    for (a, b, w) in graph.edges() {
        reduced
            .add_edge_between(partition.cluster_of(a), partition.cluster_of(b), w)
            .expect("weights are already validated");
    }
    Ok(reduced)
}

/// Runs the full multi-level method.
pub fn louvain(graph: &WeightedGraph, config: &LouvainConfig) -> Result<ClusteringResult, LouvainError> {
    let n = graph.node_count();
    if n == 0 {
        return Err(LouvainError::EmptyGraph);
    }
    if graph.total_weight() <= 0.0 {
        return Ok(ClusteringResult {
            partition: single_partition(graph),
            modularity: f64::NAN,
            levels: 0,
            history: Vec::new(),
            degenerate: true,
        });
    }

    let gamma = config.resolution.gamma();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    // membership[original node] = node of the current level graph
    let mut membership: Vec<usize> = (0..n).collect();
    let mut current = graph.clone();
    let mut history = Vec::new();
    let mut levels = 0;
    loop {
        levels += 1;
        let mut order: Vec<usize> = (0..current.node_count()).collect();
        order.shuffle(&mut rng);
        let start = single_partition(&current);
        let moved = LocalMover::new(&current, &start, gamma).run(&order, config.min_delta, &mut history);
        for slot in &mut membership {
            *slot = moved.cluster_of(*slot);
        }
        if moved.cluster_count() == current.node_count() {
            break;
        }
        current = reduce_clusters(&current, &moved)?;
    }

    let partition = Partition::from_labels(&membership);
    let modularity = modularity::modularity(graph, &partition, config.resolution)?;
    Ok(ClusteringResult {
        partition,
        modularity,
        levels,
        history,
        degenerate: false,
    })
}

struct LocalMover<'g> {
    graph: &'g WeightedGraph,
    strengths: Vec<f64>,
    m: f64,
    gamma: f64,
    assignment: Vec<usize>,
    /// Strength total per cluster slot; slots may empty out during a level.
    totals: Vec<f64>,
}

impl<'g> LocalMover<'g> {
    fn new(graph: &'g WeightedGraph, partition: &Partition, gamma: f64) -> Self {
        let strengths = graph.strengths();
        let m = strengths.iter().sum::<f64>() / 2.0;
        let mut totals = vec![0.0; partition.cluster_count()];
        for (v, &k) in strengths.iter().enumerate() {
            totals[partition.cluster_of(v)] += k;
        }
        Self {
            graph,
            strengths,
            m,
            gamma,
            assignment: partition.assignment().to_vec(),
            totals,
        }
    }

    fn quality(&self) -> f64 {
        let mut internal = vec![0.0; self.totals.len()];
        for (a, b, w) in self.graph.edges() {
            if self.assignment[a] == self.assignment[b] {
                internal[self.assignment[a]] += 2.0 * w;
            }
        }
        let two_m = 2.0 * self.m;
        internal
            .iter()
            .zip(&self.totals)
            .map(|(&inside, &tot)| inside - self.gamma * tot * tot / two_m)
            .sum::<f64>()
            / two_m
    }

    /// Sweeps until one sweep gains no more than `min_delta`, then compacts ids.
    fn run(mut self, order: &[usize], min_delta: f64, history: &mut Vec<f64>) -> Partition {
        let mut before = self.quality();
        if history.is_empty() {
            history.push(before);
        }
        for _ in 0..MAX_SWEEPS {
            let moves = self.sweep(order);
            let after = self.quality();
            history.push(after);
            if moves == 0 || after - before <= min_delta {
                break;
            }
            before = after;
        }
        Partition::from_labels(&self.assignment)
    }

    fn sweep(&mut self, order: &[usize]) -> usize {
        let mut moves = 0;
        let mut links: BTreeMap<usize, f64> = BTreeMap::new();
        for &v in order {
            let source = self.assignment[v];
            links.clear();
            for (u, w) in self.graph.neighbors(v) {
                if u != v {
                    *links.entry(self.assignment[u]).or_insert(0.0) += w;
                }
            }
            let k = self.strengths[v];
            let k_source = links.get(&source).copied().unwrap_or(0.0);
            let tot_source = self.totals[source];

            // Ascending cluster id; strict `>` keeps the first maximum.
            let mut best_gain = 0.0;
            let mut best = None;
            for (&c, &k_target) in &links {
                if c == source {
                    continue;
                }
                let g = gain(k_source, k_target, tot_source, self.totals[c], k, self.m, self.gamma);
                if g > best_gain {
                    best_gain = g;
                    best = Some(c);
                }
            }
            if let Some(c) = best {
                self.totals[source] -= k;
                self.totals[c] += k;
                self.assignment[v] = c;
                moves += 1;
            }
        }
        moves
    }
}
