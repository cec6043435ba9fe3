//! Co-interest graphs built from `(entity, topic, frequency)` records, with
//! resolution-parameterised Louvain community detection, a search for the
//! smallest resolution reaching a target cluster count, and weighted
//! eigenvector centrality.

pub mod centrality;
pub mod export;
pub mod graph;
pub mod ingest;
pub mod louvain;
pub mod modularity;
pub mod report;
pub mod resolution;

pub use centrality::{eigenvector_centrality, top_k, CentralityError, CentralityScores};
pub use graph::{GraphError, WeightedGraph};
pub use ingest::{build_cointerest_graph, normalize_weights, parse_records, InterestIndex, InterestRecord};
pub use louvain::{louvain, ClusteringResult, LouvainConfig};
pub use modularity::{delta_move, modularity, MoveTarget, Partition, ResolutionParams};
pub use resolution::{find_min_gamma, GammaSearch, GammaSearchConfig};
