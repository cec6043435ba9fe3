//! Undirected weighted graph with string-labelled nodes.
//!
//! Nodes keep their first-insertion order. Every unordered pair carries at
//! most one edge; inserting an existing pair again adds to its weight. A
//! self-loop `{v, v}` of weight `w` contributes `2w` to the strength of `v`,
//! so that `Σ_v strength(v) = 2m` holds for every graph, including the
//! aggregated graphs the Louvain engine builds.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("edge weight must be a positive finite number, got {0}")]
    InvalidWeight(f64),
    #[error("node label must not be empty")]
    EmptyLabel,
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("density is undefined for fewer than two nodes (graph has {0})")]
    TooFewNodes(usize),
}

/// An undirected weighted graph.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightedGraph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    // adjacency[u][v] == adjacency[v][u]; a self-loop is stored once at adjacency[v][v].
    adjacency: Vec<BTreeMap<usize, f64>>,
    edge_count: usize,
    self_loops: usize,
}

impl WeightedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a node if it is not already present and returns its index.
    /// Surrounding whitespace is trimmed; the label is otherwise kept verbatim.
    pub fn add_node(&mut self, label: &str) -> Result<usize, GraphError> {
        let label = label.trim();
        if label.is_empty() {
            return Err(GraphError::EmptyLabel);
        }
        if let Some(&i) = self.index.get(label) {
            return Ok(i);
        }
        let i = self.labels.len();
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), i);
        self.adjacency.push(BTreeMap::new());
        Ok(i)
    }

    /// Adds `w` to the edge `{u, v}`, creating endpoints and the edge as needed.
    pub fn add_edge(&mut self, u: &str, v: &str, w: f64) -> Result<(), GraphError> {
        check_weight(w)?;
        let a = self.add_node(u)?;
        let b = self.add_node(v)?;
        self.add_edge_between(a, b, w)
    }

    /// Index-based variant of [`add_edge`](Self::add_edge). Panics if either
    /// index is out of range.
    pub fn add_edge_between(&mut self, a: usize, b: usize, w: f64) -> Result<(), GraphError> {
        check_weight(w)?;
        assert!(a < self.labels.len() && b < self.labels.len(), "node index out of range");
        let fresh = !self.adjacency[a].contains_key(&b);
        *self.adjacency[a].entry(b).or_insert(0.0) += w;
        if a != b {
            *self.adjacency[b].entry(a).or_insert(0.0) += w;
        }
        if fresh {
            self.edge_count += 1;
            if a == b {
                self.self_loops += 1;
            }
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Number of distinct edges, self-loops included.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn self_loop_count(&self) -> usize {
        self.self_loops
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Node labels in insertion order.
    pub fn nodes(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn node_index(&self, label: &str) -> Option<usize> {
        self.index.get(label.trim()).copied()
    }

    /// Weight of `{u, v}`, or `None` when there is no such edge.
    pub fn weight(&self, u: &str, v: &str) -> Option<f64> {
        let a = self.node_index(u)?;
        let b = self.node_index(v)?;
        self.weight_between(a, b)
    }

    pub fn weight_between(&self, a: usize, b: usize) -> Option<f64> {
        self.adjacency.get(a)?.get(&b).copied()
    }

    /// Neighbours of node `i` in ascending index order, including `i` itself
    /// when it carries a self-loop.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.adjacency[i].iter().map(|(&j, &w)| (j, w))
    }

    /// Every edge once as `(a, b, w)` with `a <= b`, ordered by `(a, b)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(a, row)| {
            row.range(a..).map(move |(&b, &w)| (a, b, w))
        })
    }

    /// Weighted degree `k_i`.
    pub fn strength(&self, label: &str) -> Result<f64, GraphError> {
        let i = self
            .node_index(label)
            .ok_or_else(|| GraphError::UnknownNode(label.to_owned()))?;
        Ok(self.strength_at(i))
    }

    pub fn strength_at(&self, i: usize) -> f64 {
        self.adjacency[i]
            .iter()
            .map(|(&j, &w)| if j == i { 2.0 * w } else { w })
            .sum()
    }

    /// Strengths of all nodes, in node order.
    pub fn strengths(&self) -> Vec<f64> {
        (0..self.node_count()).map(|i| self.strength_at(i)).collect()
    }

    /// `m`, defined through `2m = Σ_v strength(v)`.
    pub fn total_weight(&self) -> f64 {
        self.strengths().iter().sum::<f64>() / 2.0
    }

    /// `E / C(V, 2)`, counting distinct non-self-loop edges.
    pub fn density(&self) -> Result<f64, GraphError> {
        let v = self.node_count();
        if v < 2 {
            return Err(GraphError::TooFewNodes(v));
        }
        let e = (self.edge_count - self.self_loops) as f64;
        let pairs = (v as f64) * (v as f64 - 1.0) / 2.0;
        Ok(e / pairs)
    }

    /// Returns a copy whose every weight is multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self, GraphError> {
        check_weight(factor)?;
        let mut out = self.clone();
        for row in &mut out.adjacency {
            for w in row.values_mut() {
                *w *= factor;
            }
        }
        Ok(out)
    }

    /// Connected components as lists of node indices, each in ascending order,
    /// listed by their smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut members = Vec::new();
            while let Some(u) = stack.pop() {
                members.push(u);
                for &v in self.adjacency[u].keys() {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }
}

fn check_weight(w: f64) -> Result<(), GraphError> {
    if w.is_finite() && w > 0.0 {
        Ok(())
    } else {
        Err(GraphError::InvalidWeight(w))
    }
}
