//! Weighted eigenvector centrality by power iteration.
//!
//! The iteration multiplies by `A + s·P`, where `P` selects the nodes with at
//! least one edge and `s` is their mean strength. The shift leaves the
//! eigenvectors of `A` unchanged but separates `λ_max` from `−λ_max`, so
//! bipartite graphs (paths, stars) converge instead of oscillating. Isolated
//! nodes get no shift and stay at exactly zero. Because `s` scales with the
//! weights, the iterates are invariant under uniform weight scaling.

use thiserror::Error;

use crate::graph::WeightedGraph;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CentralityError {
    #[error("eigenvector centrality needs at least one edge")]
    NoEdges,
    #[error("tolerance must be positive and max_iter at least 1")]
    InvalidParameters,
    #[error("power iteration did not converge in {} iterations (residual {residual:e})", last.iterations)]
    NotConverged {
        last: Box<CentralityScores>,
        residual: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentralityScores {
    /// Node labels, parallel to `scores`.
    pub nodes: Vec<String>,
    /// Non-negative, unit Euclidean norm.
    pub scores: Vec<f64>,
    /// Rayleigh quotient `xᵀAx` of the final iterate.
    pub eigenvalue: f64,
    pub iterations: usize,
    /// The graph had more than one component; small components may score ~0.
    pub disconnected: bool,
}

impl CentralityScores {
    pub fn score(&self, label: &str) -> Option<f64> {
        self.nodes.iter().position(|n| n == label).map(|i| self.scores[i])
    }
}

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 1000;

/// Power iteration from the uniform vector until the largest componentwise
/// change is at most `tol`.
pub fn eigenvector_centrality(
    graph: &WeightedGraph,
    tol: f64,
    max_iter: usize,
) -> Result<CentralityScores, CentralityError> {
    if !(tol.is_finite() && tol > 0.0) || max_iter == 0 {
        return Err(CentralityError::InvalidParameters);
    }
    if graph.edge_count() == 0 {
        return Err(CentralityError::NoEdges);
    }

    let n = graph.node_count();
    let strengths = graph.strengths();
    let active: Vec<bool> = strengths.iter().map(|&k| k > 0.0).collect();
    let active_count = active.iter().filter(|&&a| a).count() as f64;
    let shift = strengths.iter().sum::<f64>() / active_count;

    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut next = vec![0.0; n];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        multiply(graph, &x, &mut next);
        for i in 0..n {
            if active[i] {
                next[i] += shift * x[i];
            }
        }
        let norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in &mut next {
            *v /= norm;
        }
        let change = x
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut x, &mut next);
        if change <= tol {
            converged = true;
            break;
        }
    }

    let mut ax = vec![0.0; n];
    multiply(graph, &x, &mut ax);
    let eigenvalue: f64 = x.iter().zip(&ax).map(|(a, b)| a * b).sum();
    let scores = CentralityScores {
        nodes: graph.nodes().to_vec(),
        scores: x,
        eigenvalue,
        iterations,
        disconnected: !graph.is_connected(),
    };
    if converged {
        Ok(scores)
    } else {
        let residual = fixed_point_residual(graph, &scores);
        Err(CentralityError::NotConverged {
            last: Box::new(scores),
            residual,
        })
    }
}

/// `‖Ax − λx‖∞` for the scores' vector and eigenvalue.
pub fn fixed_point_residual(graph: &WeightedGraph, scores: &CentralityScores) -> f64 {
    let mut ax = vec![0.0; scores.scores.len()];
    multiply(graph, &scores.scores, &mut ax);
    ax.iter()
        .zip(&scores.scores)
        .map(|(a, x)| (a - scores.eigenvalue * x).abs())
        .fold(0.0, f64::max)
}

// y = A x with A_vv = w for a self-loop of weight w.
fn multiply(graph: &WeightedGraph, x: &[f64], y: &mut [f64]) {
    for (v, out) in y.iter_mut().enumerate() {
        *out = graph.neighbors(v).map(|(u, w)| w * x[u]).sum();
    }
}

/// The `min(k, V)` highest scores, descending; ties go to the smaller label.
pub fn top_k(scores: &CentralityScores, k: usize) -> Vec<(String, f64)> {
    let mut ranked: Vec<(String, f64)> = scores
        .nodes
        .iter()
        .cloned()
        .zip(scores.scores.iter().copied())
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(k);
    ranked
}
