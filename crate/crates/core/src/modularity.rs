//! Partition quality with a resolution coefficient.
//!
//! `Q = (1/2m) Σ_ij [A_ij − γ k_i k_j / 2m] δ(c_i, c_j)` over ordered pairs,
//! diagonal included, with `A_ii = 2w` for a self-loop of weight `w`. Summed
//! per cluster this is `(1/2m) Σ_c [in_c − γ tot_c² / 2m]` where `in_c` is the
//! ordered-pair internal weight and `tot_c` the summed strength.

use thiserror::Error;

use crate::graph::WeightedGraph;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModularityError {
    #[error("modularity is undefined for a graph with zero total weight")]
    ZeroWeight,
    #[error("partition covers {partition} nodes but the graph has {graph}")]
    SizeMismatch { partition: usize, graph: usize },
    #[error("cluster ids must be dense: id {0} is unused")]
    EmptyCluster(usize),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("cluster id {0} does not exist")]
    UnknownCluster(usize),
    #[error("resolution must be positive and finite, got {0}")]
    InvalidResolution(f64),
}

/// Assignment of every node (by index) to one of the clusters `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    assignment: Vec<usize>,
    clusters: usize,
}

impl Partition {
    /// Validates that ids are dense (`0..k`, each used).
    pub fn from_assignment(assignment: Vec<usize>) -> Result<Self, ModularityError> {
        let clusters = assignment.iter().max().map_or(0, |&m| m + 1);
        let mut used = vec![false; clusters];
        for &c in &assignment {
            used[c] = true;
        }
        if let Some(missing) = used.iter().position(|u| !u) {
            return Err(ModularityError::EmptyCluster(missing));
        }
        Ok(Self {
            assignment,
            clusters,
        })
    }

    /// Accepts arbitrary labels and renumbers them by first occurrence.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut remap = std::collections::HashMap::new();
        let assignment = labels
            .iter()
            .map(|&l| {
                let next = remap.len();
                *remap.entry(l).or_insert(next)
            })
            .collect();
        Self {
            assignment,
            clusters: remap.len(),
        }
    }

    /// Every node in its own cluster, ids in node order.
    pub fn singletons(n: usize) -> Self {
        Self {
            assignment: (0..n).collect(),
            clusters: n,
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters
    }

    pub fn cluster_of(&self, node: usize) -> usize {
        self.assignment[node]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Member lists per cluster id, members ascending.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.clusters];
        for (node, &c) in self.assignment.iter().enumerate() {
            out[c].push(node);
        }
        out
    }

    /// Same grouping, ids renumbered by each cluster's first node.
    pub fn canonical(&self) -> Self {
        Self::from_labels(&self.assignment)
    }

    pub fn check_covers(&self, graph: &WeightedGraph) -> Result<(), ModularityError> {
        if self.len() != graph.node_count() {
            return Err(ModularityError::SizeMismatch {
                partition: self.len(),
                graph: graph.node_count(),
            });
        }
        Ok(())
    }
}

/// The resolution `γ` multiplying the null-model term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolutionParams {
    gamma: f64,
}

impl ResolutionParams {
    pub fn new(gamma: f64) -> Result<Self, ModularityError> {
        if gamma.is_finite() && gamma > 0.0 {
            Ok(Self { gamma })
        } else {
            Err(ModularityError::InvalidResolution(gamma))
        }
    }

    /// Allows `γ = 0` as well; the resolution search probes its lower bound.
    pub(crate) fn non_negative(gamma: f64) -> Result<Self, ModularityError> {
        if gamma.is_finite() && gamma >= 0.0 {
            Ok(Self { gamma })
        } else {
            Err(ModularityError::InvalidResolution(gamma))
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl Default for ResolutionParams {
    fn default() -> Self {
        Self { gamma: 1.0 }
    }
}

/// Per-cluster totals shared by [`modularity`] and the Louvain engine.
pub(crate) struct ClusterTotals {
    /// Ordered-pair internal weight `Σ_{i,j ∈ c} A_ij`.
    pub internal: Vec<f64>,
    /// Summed strength.
    pub total: Vec<f64>,
}

pub(crate) fn cluster_totals(graph: &WeightedGraph, partition: &Partition) -> ClusterTotals {
    let k = partition.cluster_count();
    let mut internal = vec![0.0; k];
    let mut total = vec![0.0; k];
    for (a, b, w) in graph.edges() {
        let ca = partition.cluster_of(a);
        let cb = partition.cluster_of(b);
        if a == b {
            internal[ca] += 2.0 * w;
            total[ca] += 2.0 * w;
        } else {
            if ca == cb {
                internal[ca] += 2.0 * w;
            }
            total[ca] += w;
            total[cb] += w;
        }
    }
    ClusterTotals { internal, total }
}

pub(crate) fn quality_from_totals(totals: &ClusterTotals, two_m: f64, gamma: f64) -> f64 {
    totals
        .internal
        .iter()
        .zip(&totals.total)
        .map(|(&inside, &tot)| inside - gamma * tot * tot / two_m)
        .sum::<f64>()
        / two_m
}

/// Computes `Q` of `partition` on `graph` at resolution `params`.
pub fn modularity(
    graph: &WeightedGraph,
    partition: &Partition,
    params: ResolutionParams,
) -> Result<f64, ModularityError> {
    partition.check_covers(graph)?;
    let m = graph.total_weight();
    if m <= 0.0 {
        return Err(ModularityError::ZeroWeight);
    }
    let totals = cluster_totals(graph, partition);
    Ok(quality_from_totals(&totals, 2.0 * m, params.gamma()))
}

/// Where [`delta_move`] should put the node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveTarget {
    Cluster(usize),
    /// A new cluster holding only the moved node.
    FreshSingleton,
}

/// Change in `Q` from moving `node` out of its cluster into `target`.
///
/// With `k` the node's strength, `k_S`/`k_T` its weight into the rest of the
/// source/target cluster and `Σ_S`/`Σ_T` their strength totals (the source
/// still containing the node):
///
/// `ΔQ = (k_T − k_S)/m − γ·k·(Σ_T − Σ_S + k)/(2m²)`
///
/// Self-loop terms cancel between removal and insertion.
pub fn delta_move(
    graph: &WeightedGraph,
    partition: &Partition,
    node: &str,
    target: MoveTarget,
    params: ResolutionParams,
) -> Result<f64, ModularityError> {
    partition.check_covers(graph)?;
    let v = graph
        .node_index(node)
        .ok_or_else(|| ModularityError::UnknownNode(node.to_owned()))?;
    let m = graph.total_weight();
    if m <= 0.0 {
        return Err(ModularityError::ZeroWeight);
    }
    let source = partition.cluster_of(v);
    let target = match target {
        MoveTarget::Cluster(c) if c >= partition.cluster_count() => {
            return Err(ModularityError::UnknownCluster(c));
        }
        MoveTarget::Cluster(c) if c == source => return Ok(0.0),
        MoveTarget::Cluster(c) => Some(c),
        MoveTarget::FreshSingleton => None,
    };

    let (mut k_source, mut k_target) = (0.0, 0.0);
    for (u, w) in graph.neighbors(v) {
        if u == v {
            continue;
        }
        let c = partition.cluster_of(u);
        if c == source {
            k_source += w;
        } else if Some(c) == target {
            k_target += w;
        }
    }
    let (mut tot_source, mut tot_target) = (0.0, 0.0);
    for (u, k_u) in graph.strengths().into_iter().enumerate() {
        let c = partition.cluster_of(u);
        if c == source {
            tot_source += k_u;
        } else if Some(c) == target {
            tot_target += k_u;
        }
    }
    let k = graph.strength_at(v);
    Ok(gain(k_source, k_target, tot_source, tot_target, k, m, params.gamma()))
}

/// The closed form documented on [`delta_move`].
#[inline]
pub(crate) fn gain(k_source: f64, k_target: f64, tot_source: f64, tot_target: f64, k: f64, m: f64, gamma: f64) -> f64 {
    (k_target - k_source) / m - gamma * k * (tot_target - tot_source + k) / (2.0 * m * m)
}
