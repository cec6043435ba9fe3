//! Graph documents: DOT and GraphML for rendering tools, and the canonical
//! JSON document that also carries run metadata, clusters and rankings.
//!
//! All writers are deterministic. Nodes appear in insertion order; edges are
//! written with the lexicographically smaller label first and sorted by
//! `(source, target)`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, WeightedGraph};
use crate::modularity::{ModularityError, Partition};

/// Cluster colours, cycled by cluster id.
pub const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#aec7e8", "#ffbb78",
];

pub fn cluster_color(cluster: usize) -> &'static str {
    PALETTE[cluster % PALETTE.len()]
}

#[derive(Debug, Error)]
pub enum ExportError {
    #[error(transparent)]
    Partition(#[from] ModularityError),
    #[error("malformed graph document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid graph in document: {0}")]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Dot,
    GraphMl,
    Json,
}

/// Writes `graph` with per-node cluster ids from `partition`.
pub fn export_graph(graph: &WeightedGraph, partition: &Partition, format: GraphFormat) -> Result<String, ExportError> {
    partition.check_covers(graph)?;
    Ok(match format {
        GraphFormat::Dot => to_dot(graph, partition),
        GraphFormat::GraphMl => to_graphml(graph, partition),
        GraphFormat::Json => GraphDocument::new(graph, Some(partition)).to_json(),
    })
}

/// Edges as `(source, target, weight)` labels in export order.
pub fn sorted_edges(graph: &WeightedGraph) -> Vec<(&str, &str, f64)> {
    let mut edges: Vec<(&str, &str, f64)> = graph
        .edges()
        .map(|(a, b, w)| {
            let (x, y) = (graph.label(a), graph.label(b));
            if x <= y {
                (x, y, w)
            } else {
                (y, x, w)
            }
        })
        .collect();
    edges.sort_by(|l, r| (l.0, l.1).cmp(&(r.0, r.1)));
    edges
}

fn to_dot(graph: &WeightedGraph, partition: &Partition) -> String {
    let mut out = String::from("graph G {\n");
    for (i, label) in graph.nodes().iter().enumerate() {
        let c = partition.cluster_of(i);
        let _ = writeln!(out, "  {} [cluster={c}, color=\"{}\"];", dot_id(label), cluster_color(c));
    }
    for (s, t, w) in sorted_edges(graph) {
        let _ = writeln!(out, "  {} -- {} [weight={}];", dot_id(s), dot_id(t), format_significant(w, 6));
    }
    out.push('}');
    out
}

fn dot_id(label: &str) -> String {
    format!("\"{}\"", label.replace('\\', "\\\\").replace('"', "\\\""))
}

fn to_graphml(graph: &WeightedGraph, partition: &Partition) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" \
         xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" \
         xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns \
         http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n",
    );
    out.push_str("  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"cluster\" for=\"node\" attr.name=\"cluster\" attr.type=\"int\"/>\n");
    out.push_str("  <key id=\"color\" for=\"node\" attr.name=\"color\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n");
    out.push_str("  <graph id=\"G\" edgedefault=\"undirected\">\n");
    for (i, label) in graph.nodes().iter().enumerate() {
        let c = partition.cluster_of(i);
        let _ = writeln!(
            out,
            "    <node id=\"n{i}\"><data key=\"label\">{}</data><data key=\"cluster\">{c}</data><data key=\"color\">{}</data></node>",
            xml_escape(label),
            cluster_color(c)
        );
    }
    for (k, (s, t, w)) in sorted_edges(graph).into_iter().enumerate() {
        let s = graph.node_index(s).expect("edge endpoints are nodes");
        let t = graph.node_index(t).expect("edge endpoints are nodes");
        let _ = writeln!(
            out,
            "    <edge id=\"e{k}\" source=\"n{s}\" target=\"n{t}\"><data key=\"weight\">{w:?}</data></edge>"
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// `value` with `digits` significant digits, trailing zeros kept (`%#.Ng`).
pub fn format_significant(value: f64, digits: usize) -> String {
    assert!(digits > 0);
    if value == 0.0 || !value.is_finite() {
        return format!("{:.*}", digits - 1, value);
    }
    let mut exponent = value.abs().log10().floor() as i32;
    // rounding may carry into the next power of ten
    let rounded = format!("{:.*e}", digits - 1, value);
    if let Some(e) = rounded.split('e').nth(1) {
        exponent = e.parse().unwrap_or(exponent);
    }
    if exponent < -5 || exponent >= digits as i32 {
        return rounded;
    }
    let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
    format!("{value:.decimals$}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub seed: Option<u64>,
    pub gamma: Option<f64>,
    pub modularity: Option<f64>,
    pub node_count: usize,
    pub edge_count: usize,
    pub density: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterEntry {
    pub id: usize,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub node: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub source: String,
    pub target: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeEntry {
    pub gamma: f64,
    pub clusters: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub min_clusters: usize,
    pub evaluations: usize,
    pub trace: Vec<ProbeEntry>,
}

/// The canonical JSON document. Field order is the serialized key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub metadata: Metadata,
    #[serde(default)]
    pub clusters: Vec<ClusterEntry>,
    #[serde(default)]
    pub centrality: Vec<RankEntry>,
    pub nodes: Vec<String>,
    pub edges: Vec<EdgeEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_search: Option<SearchSummary>,
}

impl GraphDocument {
    pub fn new(graph: &WeightedGraph, partition: Option<&Partition>) -> Self {
        let clusters = partition
            .map(|p| {
                p.clusters()
                    .into_iter()
                    .enumerate()
                    .map(|(id, members)| ClusterEntry {
                        id,
                        members: members.into_iter().map(|i| graph.label(i).to_owned()).collect(),
                    })
                    .collect()
            })
            .unwrap_or_default();
        Self {
            metadata: Metadata {
                seed: None,
                gamma: None,
                modularity: None,
                node_count: graph.node_count(),
                edge_count: graph.edge_count(),
                density: graph.density().ok(),
                record_count: None,
                warnings: Vec::new(),
            },
            clusters,
            centrality: Vec::new(),
            nodes: graph.nodes().to_vec(),
            edges: sorted_edges(graph)
                .into_iter()
                .map(|(s, t, w)| EdgeEntry {
                    source: s.to_owned(),
                    target: t.to_owned(),
                    weight: w,
                })
                .collect(),
            gamma_search: None,
        }
    }

    /// Compact JSON, newline-terminated. Non-finite numbers become `null`.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("document is always serializable");
        s.push('\n');
        s
    }

    /// Rebuilds the graph: nodes in listed order, then edges.
    pub fn to_graph(&self) -> Result<WeightedGraph, ExportError> {
        let mut g = WeightedGraph::new();
        for n in &self.nodes {
            g.add_node(n)?;
        }
        for e in &self.edges {
            g.add_edge(&e.source, &e.target, e.weight)?;
        }
        Ok(g)
    }
}

/// Reads the graph back from a canonical JSON document.
pub fn read_graph_json(text: &str) -> Result<WeightedGraph, ExportError> {
    let doc: GraphDocument = serde_json::from_str(text)?;
    doc.to_graph()
}
