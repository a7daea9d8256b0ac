//! Graph-based selective annotation.
//!
//! Given a pool of instance embeddings and an annotation budget `M`, the
//! engine builds a kNN cosine-similarity graph, splits it into `K` balanced
//! parts with a multilevel recursive-bisection partitioner, and greedily
//! picks the highest residual-degree vertices inside each part. The
//! selected subset then serves as the prompt-example store for
//! similarity-based (or random) retrieval.
//!
//! ```
//! use fastgas::{build_knn_graph, fastgas_select, generate_synthetic};
//!
//! let pool = generate_synthetic(300, 16, 3, 0.2, 7).unwrap();
//! let graph = build_knn_graph(&pool, 10).unwrap();
//! let result = fastgas_select(&graph, 3, 18, 0).unwrap();
//! assert_eq!(result.selected.len(), 18);
//! ```
//!
//! The runnable programs under `examples/` walk through each stage.

pub mod bench;
pub mod config;
pub mod embedding;
pub mod error;
pub mod graph;
pub mod partition;
pub mod pipeline;
pub mod retrieval;
pub mod rng;
pub mod select;
pub mod timing;
pub mod verify;

pub use embedding::{
    cosine_similarity, generate_synthetic, generate_synthetic_labeled, load_embeddings,
    save_embeddings, EmbeddingFormat, EmbeddingMatrix, SyntheticPool, SyntheticSpec,
};
pub use error::{Error, Result};
pub use graph::{build_knn_graph, edge_cut, GraphFile, SimilarityGraph};
pub use partition::{partition_kway, Bisection, Partition, PartitionOptions};
pub use timing::Timings;
pub use retrieval::{retrieve_random, retrieve_similar, PromptOrder, RetrievalMode, RetrievalPlan};
pub use select::{
    brute_force_max_coverage, coverage_objective, fastgas_select, greedy_select,
    pagerank_select, random_select, subcluster_select, top_degree_select, Method,
    SelectionResult,
};
