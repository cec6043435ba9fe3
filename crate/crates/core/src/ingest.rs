//! Reading `(entity, topic, frequency)` records and turning them into a
//! co-interest graph.
//!
//! Two entities are joined when they share at least one topic with a positive
//! frequency on both sides. The raw weight of the edge is
//! `Σ_{t ∈ S} g(a, t) + g(b, t)` over the shared topic set `S`, where `g` is
//! the merged per-(entity, topic) frequency.

use std::collections::BTreeMap;
use std::io::Read;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::WeightedGraph;

/// Required CSV header, in order.
pub const CSV_HEADER: [&str; 3] = ["country", "topic", "frequency"];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("invalid header {found:?}: expected `country,topic,frequency`")]
    Header { found: Vec<String> },
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("record {index}: {message}")]
    JsonRecord { index: usize, message: String },
    #[error("malformed JSON input: {0}")]
    Json(#[from] serde_json::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// One observation: `entity` is interested in `topic` with weight `frequency`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterestRecord {
    pub entity: String,
    pub topic: String,
    pub frequency: u64,
}

impl InterestRecord {
    pub fn new(entity: &str, topic: &str, frequency: u64) -> Self {
        Self {
            entity: entity.to_owned(),
            topic: topic.to_owned(),
            frequency,
        }
    }
}

/// Parses the canonical CSV format. Row numbers in errors are 1-based file
/// lines, so the first data row is line 2.
pub fn parse_records<R: Read>(source: R) -> Result<Vec<InterestRecord>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let header = reader.headers().map_err(|e| row_error(&e, 1))?;
    let found: Vec<String> = header.iter().map(str::to_owned).collect();
    if found.len() != CSV_HEADER.len() || found.iter().zip(CSV_HEADER).any(|(f, e)| f != e) {
        return Err(IngestError::Header { found });
    }

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| row_error(&e, 0))?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let fail = |message: String| IngestError::Row { line, message };
        if row.len() != 3 {
            return Err(fail(format!("expected 3 fields, found {}", row.len())));
        }
        let record = validate(&row[0], &row[1], &row[2]).map_err(fail)?;
        records.push(record);
    }
    Ok(records)
}

#[derive(Deserialize)]
struct JsonRecord {
    country: String,
    topic: String,
    frequency: serde_json::Number,
}

/// Parses the alternative input: a JSON array of
/// `{"country": …, "topic": …, "frequency": …}` objects.
pub fn parse_records_json<R: Read>(source: R) -> Result<Vec<InterestRecord>, IngestError> {
    let raw: Vec<JsonRecord> = serde_json::from_reader(source)?;
    raw.into_iter()
        .enumerate()
        .map(|(index, r)| {
            validate(&r.country, &r.topic, &r.frequency.to_string())
                .map_err(|message| IngestError::JsonRecord { index, message })
        })
        .collect()
}

fn validate(entity: &str, topic: &str, frequency: &str) -> Result<InterestRecord, String> {
    let entity = entity.trim();
    let topic = topic.trim();
    let frequency = frequency.trim();
    if entity.is_empty() {
        return Err("empty country field".into());
    }
    if topic.is_empty() {
        return Err("empty topic field".into());
    }
    let frequency = match frequency.parse::<u64>() {
        Ok(f) => f,
        Err(_) if frequency.starts_with('-') && frequency[1..].parse::<u64>().is_ok() => {
            return Err(format!("negative frequency {frequency}"));
        }
        Err(_) => return Err(format!("frequency `{frequency}` is not a non-negative integer")),
    };
    Ok(InterestRecord::new(entity, topic, frequency))
}

fn row_error(e: &csv::Error, fallback_line: u64) -> IngestError {
    let line = e.position().map(|p| p.line()).unwrap_or(fallback_line);
    IngestError::Row {
        line,
        message: e.to_string(),
    }
}

/// `g(entity, topic)`: merged positive frequencies per entity, in first-seen order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InterestIndex {
    by_entity: IndexMap<String, IndexMap<String, u64>>,
}

impl InterestIndex {
    /// Builds the index, summing duplicate `(entity, topic)` pairs and dropping
    /// zero-frequency records.
    pub fn from_records<'a, I>(records: I) -> Self
    where
        I: IntoIterator<Item = &'a InterestRecord>,
    {
        let mut by_entity: IndexMap<String, IndexMap<String, u64>> = IndexMap::new();
        for r in records {
            if r.frequency == 0 {
                continue;
            }
            *by_entity
                .entry(r.entity.clone())
                .or_default()
                .entry(r.topic.clone())
                .or_insert(0) += r.frequency;
        }
        Self { by_entity }
    }

    pub fn entities(&self) -> impl Iterator<Item = &str> {
        self.by_entity.keys().map(String::as_str)
    }

    pub fn entity_count(&self) -> usize {
        self.by_entity.len()
    }

    /// `g(entity, topic)`, zero when the entity has no such interest.
    pub fn frequency(&self, entity: &str, topic: &str) -> u64 {
        self.by_entity
            .get(entity)
            .and_then(|t| t.get(topic))
            .copied()
            .unwrap_or(0)
    }

    /// `T_c`, the topics of `entity`.
    pub fn topics(&self, entity: &str) -> impl Iterator<Item = &str> {
        self.by_entity
            .get(entity)
            .into_iter()
            .flat_map(|t| t.keys().map(String::as_str))
    }

    /// Number of distinct `(entity, topic)` interests.
    pub fn interest_count(&self) -> usize {
        self.by_entity.values().map(IndexMap::len).sum()
    }
}

/// Builds the co-interest graph with raw (integer-valued) weights.
pub fn build_cointerest_graph(records: &[InterestRecord]) -> WeightedGraph {
    build_from_index(&InterestIndex::from_records(records))
}

/// Builds the graph from an already merged index. Pairs are discovered
/// through a topic → entities inverted index, so only entities that actually
/// share a topic are ever compared.
pub fn build_from_index(index: &InterestIndex) -> WeightedGraph {
    let mut graph = WeightedGraph::new();
    for entity in index.entities() {
        graph.add_node(entity).expect("entity labels are validated non-empty");
    }

    let mut by_topic: BTreeMap<&str, Vec<(usize, u64)>> = BTreeMap::new();
    for (e, topics) in index.by_entity.values().enumerate() {
        for (topic, &f) in topics {
            by_topic.entry(topic.as_str()).or_default().push((e, f));
        }
    }

    // Integer accumulation keeps the weights independent of record order.
    let mut raw: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for holders in by_topic.values() {
        for (i, &(a, fa)) in holders.iter().enumerate() {
            for &(b, fb) in &holders[i + 1..] {
                let key = if a < b { (a, b) } else { (b, a) };
                *raw.entry(key).or_insert(0) += fa + fb;
            }
        }
    }
    for ((a, b), w) in raw {
        graph
            .add_edge_between(a, b, w as f64)
            .expect("shared interests have positive weight");
    }
    graph
}

/// Result of [`normalize_weights`].
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub graph: WeightedGraph,
    /// Set when the graph had no edges and was returned unchanged.
    pub edgeless: bool,
}

/// Divides every weight by the sum of all weights, mapping them into `(0, 1]`.
pub fn normalize_weights(graph: &WeightedGraph) -> Normalized {
    let total: f64 = graph.edges().map(|(_, _, w)| w).sum();
    if graph.edge_count() == 0 || total <= 0.0 {
        return Normalized {
            graph: graph.clone(),
            edgeless: true,
        };
    }
    let mut out = WeightedGraph::new();
    for label in graph.nodes() {
        out.add_node(label).expect("labels already validated");
    }
    for (a, b, w) in graph.edges() {
        out.add_edge_between(a, b, w / total)
            .expect("scaled weight stays positive");
    }
    Normalized {
        graph: out,
        edgeless: false,
    }
}
