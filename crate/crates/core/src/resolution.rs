//! Bisection over the resolution `γ` for the smallest value whose clustering
//! has at least a target number of clusters.
//!
//! Cluster count is not guaranteed to be monotone in `γ` for a greedy method,
//! so the search only promises a bracket: the returned `γ*` is feasible, and
//! the bracket's lower end, within `precision` of `γ*`, was not.

use thiserror::Error;

use crate::graph::WeightedGraph;
use crate::louvain::{louvain, ClusteringResult, LouvainConfig, LouvainError};
use crate::modularity::ResolutionParams;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot form {requested} clusters from {nodes} nodes")]
    TooManyClusters { requested: usize, nodes: usize },
    #[error("resolution {cap} still yields only {clusters} clusters (wanted {requested})")]
    Infeasible {
        cap: f64,
        clusters: usize,
        requested: usize,
    },
    #[error("graph has zero total weight")]
    ZeroWeight,
    #[error(transparent)]
    Louvain(#[from] LouvainError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaSearchConfig {
    pub min_clusters: usize,
    pub lo: f64,
    pub hi: f64,
    /// Bisection stops once `hi − lo <= precision`.
    pub precision: f64,
    /// Upper limit for doubling `hi`.
    pub cap: f64,
    /// Used for every trial clustering.
    pub seed: u64,
}

impl Default for GammaSearchConfig {
    fn default() -> Self {
        Self {
            min_clusters: 10,
            lo: 0.0,
            hi: 8.0,
            precision: 1e-9,
            cap: 1024.0,
            seed: 0,
        }
    }
}

impl GammaSearchConfig {
    fn validate(&self) -> Result<(), SearchError> {
        let bad = |msg: &str| Err(SearchError::InvalidConfig(msg.to_owned()));
        if self.min_clusters == 0 {
            return bad("min_clusters must be at least 1");
        }
        if !(self.lo.is_finite() && self.lo >= 0.0) {
            return bad("lower bound must be a non-negative number");
        }
        if !(self.hi.is_finite() && self.hi > self.lo) {
            return bad("upper bound must exceed the lower bound");
        }
        if !(self.precision.is_finite() && self.precision > 0.0) {
            return bad("precision must be positive");
        }
        if !(self.cap.is_finite() && self.cap >= self.hi) {
            return bad("cap must be at least the upper bound");
        }
        Ok(())
    }
}

/// One trial clustering made during the search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaProbe {
    pub gamma: f64,
    pub clusters: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaSearch {
    pub gamma: f64,
    /// The clustering computed at `gamma` during the search.
    pub result: ClusteringResult,
    /// Upper bound after any doubling.
    pub hi: f64,
    /// Trial clusterings in the order they ran.
    pub trace: Vec<GammaProbe>,
}

impl GammaSearch {
    /// Number of Louvain runs performed.
    pub fn evaluations(&self) -> usize {
        self.trace.len()
    }
}

/// Finds the smallest `γ` in `[lo, cap]` (to within `precision`) whose
/// clustering has at least `min_clusters` clusters.
///
/// `lo` is probed first and returned as-is when it already qualifies. Then
/// `hi` is doubled until feasible, after which `[lo, hi]` is bisected keeping
/// `hi` feasible and `lo` infeasible.
pub fn find_min_gamma(graph: &WeightedGraph, config: &GammaSearchConfig) -> Result<GammaSearch, SearchError> {
    config.validate()?;
    if graph.is_empty() {
        return Err(LouvainError::EmptyGraph.into());
    }
    if config.min_clusters > graph.node_count() {
        return Err(SearchError::TooManyClusters {
            requested: config.min_clusters,
            nodes: graph.node_count(),
        });
    }
    if graph.total_weight() <= 0.0 {
        return Err(SearchError::ZeroWeight);
    }

    let mut trace = Vec::new();
    let mut run = |gamma: f64| -> Result<ClusteringResult, SearchError> {
        let resolution = ResolutionParams::non_negative(gamma).map_err(LouvainError::from)?;
        let result = louvain(graph, &LouvainConfig::new(resolution, config.seed))?;
        trace.push(GammaProbe {
            gamma,
            clusters: result.cluster_count(),
        });
        Ok(result)
    };
    let feasible = |r: &ClusteringResult| r.cluster_count() >= config.min_clusters;

    let mut lo = config.lo;
    let at_lo = run(lo)?;
    if feasible(&at_lo) {
        return Ok(GammaSearch {
            gamma: lo,
            result: at_lo,
            hi: config.hi,
            trace,
        });
    }

    let mut hi = config.hi;
    let mut best = run(hi)?;
    while !feasible(&best) {
        if hi >= config.cap {
            return Err(SearchError::Infeasible {
                cap: hi,
                clusters: best.cluster_count(),
                requested: config.min_clusters,
            });
        }
        lo = hi;
        hi = (2.0 * hi).min(config.cap);
        best = run(hi)?;
    }
    let hi_after_doubling = hi;

    while hi - lo > config.precision {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        let r = run(mid)?;
        if feasible(&r) {
            hi = mid;
            best = r;
        } else {
            lo = mid;
        }
    }

    Ok(GammaSearch {
        gamma: hi,
        result: best,
        hi: hi_after_doubling,
        trace,
    })
}
