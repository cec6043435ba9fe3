//! End-to-end pipeline: records → normalized graph → clustering → centrality,
//! and the renderers behind the command-line subcommands.

use std::fmt::Write as _;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::centrality::{self, CentralityError, CentralityScores};
use crate::export::{
    self, format_significant, ClusterEntry, ExportError, GraphDocument, GraphFormat, ProbeEntry, RankEntry,
    SearchSummary,
};
use crate::graph::WeightedGraph;
use crate::ingest::{self, IngestError, InterestIndex, InterestRecord};
use crate::louvain::{louvain, ClusteringResult, LouvainConfig, LouvainError};
use crate::modularity::{ModularityError, Partition, ResolutionParams};
use crate::resolution::{find_min_gamma, GammaSearch, GammaSearchConfig, SearchError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_NOT_CONVERGED: i32 = 4;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Ingest { path: PathBuf, source: IngestError },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("resolution search failed: {0}")]
    Search(#[from] SearchError),
    #[error(transparent)]
    Louvain(#[from] LouvainError),
    #[error(transparent)]
    Export(#[from] ExportError),
    #[error("format `{format}` is not available for `{view}`")]
    UnsupportedFormat { format: &'static str, view: &'static str },
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Search(_) => EXIT_INFEASIBLE,
            _ => EXIT_INPUT,
        }
    }
}

impl From<ModularityError> for PipelineError {
    fn from(e: ModularityError) -> Self {
        PipelineError::Config(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaMode {
    Fixed(f64),
    Auto {
        min_clusters: usize,
        lo: f64,
        hi: f64,
        precision: f64,
    },
}

impl Default for GammaMode {
    fn default() -> Self {
        GammaMode::Fixed(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
    Dot,
    GraphMl,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Text => "text",
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
            OutputFormat::Dot => "dot",
            OutputFormat::GraphMl => "graphml",
        }
    }
}

/// What a subcommand shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum View {
    Stats,
    Clusters,
    Centrality,
    Graph,
    Report,
}

impl View {
    fn name(self) -> &'static str {
        match self {
            View::Stats => "stats",
            View::Clusters => "cluster",
            View::Centrality => "centrality",
            View::Graph => "export",
            View::Report => "report",
        }
    }

    fn needs_clustering(self) -> bool {
        matches!(self, View::Clusters | View::Graph | View::Report)
    }

    fn needs_centrality(self) -> bool {
        matches!(self, View::Centrality | View::Report)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input_path: PathBuf,
    pub seed: u64,
    pub gamma_mode: GammaMode,
    pub top_k: usize,
    pub output_format: OutputFormat,
    /// `None` writes to standard output.
    pub output_path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stats {
    pub node_count: usize,
    pub edge_count: usize,
    /// `None` below two nodes.
    pub density: Option<f64>,
    pub record_count: usize,
    /// Distinct positive `(entity, topic)` pairs.
    pub interest_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportBundle {
    pub seed: u64,
    pub stats: Stats,
    /// Normalized co-interest graph.
    pub graph: WeightedGraph,
    pub clustering: Option<ClusteringResult>,
    pub gamma_used: Option<f64>,
    pub search: Option<SearchSummary>,
    pub centrality: Option<CentralityScores>,
    pub centrality_top: Vec<(String, f64)>,
    pub centrality_converged: bool,
    pub warnings: Vec<String>,
}

impl ReportBundle {
    pub fn modularity(&self) -> Option<f64> {
        self.clustering
            .as_ref()
            .filter(|c| !c.degenerate)
            .map(|c| c.modularity)
    }

    pub fn partition(&self) -> Partition {
        self.clustering
            .as_ref()
            .map(|c| c.partition.clone())
            .unwrap_or_else(|| Partition::singletons(self.graph.node_count()))
    }

    /// Cluster member labels, by cluster id.
    pub fn clusters(&self) -> Vec<Vec<String>> {
        match &self.clustering {
            Some(c) => c
                .partition
                .clusters()
                .into_iter()
                .map(|m| m.into_iter().map(|i| self.graph.label(i).to_owned()).collect())
                .collect(),
            None => Vec::new(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.centrality_converged {
            EXIT_OK
        } else {
            EXIT_NOT_CONVERGED
        }
    }
}

/// Reads records from a CSV file, or a JSON array when the file name ends in
/// `.json` or the content starts with `[`.
pub fn load_records(path: &Path) -> Result<Vec<InterestRecord>, PipelineError> {
    let io = |source| PipelineError::Io {
        path: path.to_owned(),
        source,
    };
    let text = std::fs::read_to_string(path).map_err(io)?;
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
        || text.trim_start().starts_with('[');
    let parsed = if is_json {
        ingest::parse_records_json(text.as_bytes())
    } else {
        ingest::parse_records(text.as_bytes())
    };
    parsed.map_err(|source| PipelineError::Ingest {
        path: path.to_owned(),
        source,
    })
}

/// Runs the stages `view` needs on already parsed records.
pub fn analyze(records: &[InterestRecord], config: &RunConfig, view: View) -> Result<ReportBundle, PipelineError> {
    if config.top_k == 0 {
        return Err(PipelineError::Config("top-k must be at least 1".into()));
    }
    let index = InterestIndex::from_records(records);
    let raw = ingest::build_from_index(&index);
    let normalized = ingest::normalize_weights(&raw);
    let graph = normalized.graph;
    let mut warnings = Vec::new();
    if graph.is_empty() {
        warnings.push("input has no positive-frequency records; the graph is empty".to_owned());
    } else if normalized.edgeless {
        warnings.push("no two entities share a topic; the graph has no edges".to_owned());
    }

    let stats = Stats {
        node_count: graph.node_count(),
        edge_count: graph.edge_count(),
        density: graph.density().ok(),
        record_count: records.len(),
        interest_count: index.interest_count(),
    };

    let mut bundle = ReportBundle {
        seed: config.seed,
        stats,
        graph,
        clustering: None,
        gamma_used: None,
        search: None,
        centrality: None,
        centrality_top: Vec::new(),
        centrality_converged: true,
        warnings,
    };

    if view.needs_clustering() {
        cluster_stage(&mut bundle, config)?;
    }
    if view.needs_centrality() {
        centrality_stage(&mut bundle, config.top_k);
    }
    Ok(bundle)
}

fn cluster_stage(bundle: &mut ReportBundle, config: &RunConfig) -> Result<(), PipelineError> {
    let graph = &bundle.graph;
    if graph.is_empty() {
        bundle.warnings.push("clustering skipped: empty graph".to_owned());
        return Ok(());
    }
    if graph.edge_count() == 0 {
        bundle
            .warnings
            .push("clustering skipped: every node stays in its own cluster".to_owned());
        let degenerate = louvain(graph, &LouvainConfig::new(ResolutionParams::default(), config.seed))?;
        bundle.clustering = Some(degenerate);
        return Ok(());
    }
    match config.gamma_mode {
        GammaMode::Fixed(gamma) => {
            let resolution = ResolutionParams::new(gamma)?;
            bundle.clustering = Some(louvain(graph, &LouvainConfig::new(resolution, config.seed))?);
            bundle.gamma_used = Some(gamma);
        }
        GammaMode::Auto {
            min_clusters,
            lo,
            hi,
            precision,
        } => {
            let search_config = GammaSearchConfig {
                min_clusters,
                lo,
                hi,
                precision,
                seed: config.seed,
                ..GammaSearchConfig::default()
            };
            let GammaSearch { gamma, result, trace, .. } = find_min_gamma(graph, &search_config)?;
            bundle.search = Some(SearchSummary {
                min_clusters,
                evaluations: trace.len(),
                trace: trace
                    .iter()
                    .map(|p| ProbeEntry {
                        gamma: p.gamma,
                        clusters: p.clusters,
                    })
                    .collect(),
            });
            bundle.clustering = Some(result);
            bundle.gamma_used = Some(gamma);
        }
    }
    Ok(())
}

fn centrality_stage(bundle: &mut ReportBundle, top_k: usize) {
    if bundle.graph.edge_count() == 0 {
        bundle.warnings.push("centrality skipped: the graph has no edges".to_owned());
        return;
    }
    let scores = match centrality::eigenvector_centrality(
        &bundle.graph,
        centrality::DEFAULT_TOLERANCE,
        centrality::DEFAULT_MAX_ITER,
    ) {
        Ok(scores) => scores,
        Err(CentralityError::NotConverged { last, residual }) => {
            bundle.centrality_converged = false;
            bundle.warnings.push(format!(
                "centrality did not converge after {} iterations (residual {residual:e}); scores are the last iterate",
                last.iterations
            ));
            *last
        }
        Err(e) => {
            bundle.warnings.push(format!("centrality skipped: {e}"));
            return;
        }
    };
    if scores.disconnected {
        bundle
            .warnings
            .push("graph is disconnected; smaller components may receive near-zero centrality".to_owned());
    }
    bundle.centrality_top = centrality::top_k(&scores, top_k);
    bundle.centrality = Some(scores);
}

/// Loads `config.input_path` and runs the stages of `view`.
pub fn run_pipeline(config: &RunConfig, view: View) -> Result<ReportBundle, PipelineError> {
    let records = load_records(&config.input_path)?;
    analyze(&records, config, view)
}

/// The canonical JSON document for a bundle.
pub fn document(bundle: &ReportBundle) -> GraphDocument {
    let partition = bundle.clustering.as_ref().map(|c| &c.partition);
    let mut doc = GraphDocument::new(&bundle.graph, partition);
    doc.metadata.seed = Some(bundle.seed);
    doc.metadata.gamma = bundle.gamma_used;
    doc.metadata.modularity = bundle.modularity();
    doc.metadata.record_count = Some(bundle.stats.record_count);
    doc.metadata.warnings = bundle.warnings.clone();
    doc.clusters = bundle
        .clusters()
        .into_iter()
        .enumerate()
        .map(|(id, members)| ClusterEntry { id, members })
        .collect();
    doc.centrality = bundle
        .centrality_top
        .iter()
        .map(|(node, score)| RankEntry {
            node: node.clone(),
            score: *score,
        })
        .collect();
    doc.gamma_search = bundle.search.clone();
    doc
}

/// Renders `bundle` as `view` in `format`.
pub fn render(bundle: &ReportBundle, view: View, format: OutputFormat) -> Result<String, PipelineError> {
    let unsupported = || PipelineError::UnsupportedFormat {
        format: format.name(),
        view: view.name(),
    };
    match format {
        OutputFormat::Json => Ok(document(bundle).to_json()),
        OutputFormat::Dot | OutputFormat::GraphMl => {
            if !matches!(view, View::Graph | View::Report) {
                return Err(unsupported());
            }
            let graph_format = if format == OutputFormat::Dot {
                GraphFormat::Dot
            } else {
                GraphFormat::GraphMl
            };
            Ok(export::export_graph(&bundle.graph, &bundle.partition(), graph_format)?)
        }
        OutputFormat::Csv => match view {
            View::Stats => Ok(stats_csv(bundle)),
            View::Centrality => Ok(ranking_csv(bundle)),
            View::Clusters | View::Report => Ok(node_csv(bundle)),
            View::Graph => Err(unsupported()),
        },
        OutputFormat::Text => match view {
            View::Stats => Ok(stats_text(bundle)),
            View::Clusters => Ok(clusters_text(bundle)),
            View::Centrality => Ok(ranking_text(bundle)),
            View::Report => Ok(format!(
                "{}\n{}\n{}",
                stats_text(bundle),
                clusters_text(bundle),
                ranking_text(bundle)
            )),
            View::Graph => Err(unsupported()),
        },
    }
}

fn stats_text(bundle: &ReportBundle) -> String {
    let s = &bundle.stats;
    let density = s
        .density
        .map_or_else(|| "undefined".to_owned(), |d| format_significant(d, 4));
    format!(
        "nodes: {}\nedges: {}\ndensity: {density}\nrecords: {}\ninterests: {}\n",
        s.node_count, s.edge_count, s.record_count, s.interest_count
    )
}

fn clusters_text(bundle: &ReportBundle) -> String {
    let mut out = String::new();
    if let Some(g) = bundle.gamma_used {
        let _ = writeln!(out, "gamma: {g}");
    }
    if let Some(q) = bundle.modularity() {
        let _ = writeln!(out, "modularity: {q:.6}");
    }
    out.push_str("Cluster # | Members\n");
    for (id, members) in bundle.clusters().iter().enumerate() {
        let _ = writeln!(out, "{id} | {}", members.join(", "));
    }
    out
}

fn ranking_text(bundle: &ReportBundle) -> String {
    let mut out = String::from("Name | Eigenvector Centrality\n");
    for (node, score) in &bundle.centrality_top {
        let _ = writeln!(out, "{node} | {score:.3}");
    }
    out
}

fn csv_string(rows: Vec<Vec<String>>) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn stats_csv(bundle: &ReportBundle) -> String {
    let s = &bundle.stats;
    csv_string(vec![
        vec!["node_count".into(), "edge_count".into(), "density".into(), "record_count".into()],
        vec![
            s.node_count.to_string(),
            s.edge_count.to_string(),
            s.density.map(|d| d.to_string()).unwrap_or_default(),
            s.record_count.to_string(),
        ],
    ])
}

fn ranking_csv(bundle: &ReportBundle) -> String {
    let mut rows = vec![vec!["rank".into(), "node".into(), "score".into()]];
    for (i, (node, score)) in bundle.centrality_top.iter().enumerate() {
        rows.push(vec![(i + 1).to_string(), node.clone(), score.to_string()]);
    }
    csv_string(rows)
}

fn node_csv(bundle: &ReportBundle) -> String {
    let mut rows = vec![vec!["node".into(), "cluster".into(), "score".into()]];
    for (i, label) in bundle.graph.nodes().iter().enumerate() {
        let cluster = bundle
            .clustering
            .as_ref()
            .map(|c| c.partition.cluster_of(i).to_string())
            .unwrap_or_default();
        let score = bundle
            .centrality
            .as_ref()
            .map(|c| c.scores[i].to_string())
            .unwrap_or_default();
        rows.push(vec![label.clone(), cluster, score]);
    }
    csv_string(rows)
}

/// Writes `text` to `path`, or standard output when `path` is `None`.
pub fn write_output(path: Option<&Path>, text: &str) -> Result<(), PipelineError> {
    use std::io::Write;
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| PipelineError::Io {
            path: p.to_owned(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| PipelineError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

/// Reads a canonical JSON document from disk.
pub fn read_document(path: &Path) -> Result<GraphDocument, PipelineError> {
    let file = File::open(path).map_err(|source| PipelineError::Io {
        path: path.to_owned(),
        source,
    })?;
    serde_json::from_reader(BufReader::new(file)).map_err(|e| PipelineError::Export(e.into()))
}
