//! The command bodies behind the CLI: each takes a resolved [`RunConfig`]
//! and returns the serializable output, leaving I/O of the result to the
//! caller (see [`write_json`]).

use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::config::RunConfig;
use crate::embedding::{generate_synthetic, load_embeddings, EmbeddingFormat, EmbeddingMatrix};
use crate::error::{Error, Result};
use crate::graph::{build_knn_graph, GraphFile, SimilarityGraph};
use crate::partition::{partition_kway_with, PartitionFile, PartitionOptions};
use crate::retrieval::{retrieve_random, retrieve_similar, RetrievalFile, RetrievalMode};
use crate::select::{
    fastgas_select_with, pagerank_select, random_select, subcluster_select, top_degree_select,
    Method, SelectionFile, SelectionResult,
};
use crate::timing::{elapsed_ms, Timings};

/// Loads the configured pool: `input` if set, else the synthetic spec.
pub fn load_pool(cfg: &RunConfig, timings: &mut Timings) -> Result<EmbeddingMatrix> {
    let start = Instant::now();
    let matrix = match (&cfg.input, &cfg.synthetic) {
        (Some(path), _) => load_embeddings(path, format_for(cfg.format, path))?,
        (None, Some(s)) => generate_synthetic(s.n, s.dim, s.clusters, s.spread, s.seed)?,
        (None, None) => {
            return Err(Error::InvalidParameter(
                "no embeddings given (--input, or a synthetic pool via --preset/config)".into(),
            ))
        }
    };
    timings.set("embed_load", elapsed_ms(start));
    Ok(matrix)
}

fn format_for(explicit: Option<EmbeddingFormat>, path: &Path) -> EmbeddingFormat {
    explicit.unwrap_or_else(|| EmbeddingFormat::from_path(path))
}

/// The graph from `--graph` if given, otherwise built from the pool.
fn obtain_graph(
    cfg: &RunConfig,
    pool: Option<&EmbeddingMatrix>,
    timings: &mut Timings,
) -> Result<SimilarityGraph> {
    if let Some(path) = &cfg.graph {
        return GraphFile::load(path)?.to_graph();
    }
    let pool = pool.ok_or_else(|| {
        Error::InvalidParameter("no graph given (--graph or embeddings via --input)".into())
    })?;
    let start = Instant::now();
    let g = build_knn_graph(pool, cfg.k)?;
    timings.set("knn", elapsed_ms(start));
    Ok(g)
}

/// Summary of a graph build, for the console.
#[derive(Debug, Clone, Serialize)]
pub struct BuildGraphReport {
    pub num_vertices: usize,
    pub num_edges: usize,
    pub timings_ms: Timings,
}

pub fn cmd_build_graph(cfg: &RunConfig) -> Result<(GraphFile, BuildGraphReport)> {
    let start = Instant::now();
    let mut timings = Timings::new();
    let pool = load_pool(cfg, &mut timings)?;
    let t = Instant::now();
    let g = build_knn_graph(&pool, cfg.k)?;
    timings.set("knn", elapsed_ms(t));
    timings.set("total", elapsed_ms(start));
    let report = BuildGraphReport {
        num_vertices: g.num_vertices(),
        num_edges: g.num_edges(),
        timings_ms: timings,
    };
    Ok((g.to_file(Some(cfg.k)), report))
}

pub fn cmd_partition(cfg: &RunConfig) -> Result<PartitionFile> {
    let parts = cfg.require_parts()?;
    let mut timings = Timings::new();
    let pool = if cfg.graph.is_none() { Some(load_pool(cfg, &mut timings)?) } else { None };
    let g = obtain_graph(cfg, pool.as_ref(), &mut timings)?;
    let outcome = partition_kway_with(&g, parts, cfg.seed, &PartitionOptions::with_epsilon(cfg.epsilon))?;
    let stages = &outcome.timings;
    let mut file_timings = Timings::new();
    file_timings.set("coarsen", stages.get("coarsen"));
    file_timings.set("init", stages.get("init_bisect"));
    file_timings.set("refine", stages.get("refine"));
    file_timings.set("total", stages.get("partition_total"));
    Ok(PartitionFile {
        k: parts,
        seed: cfg.seed,
        assignment: outcome.partition.assignment().to_vec(),
        cut: outcome.cut,
        part_sizes: outcome.partition.part_sizes().to_vec(),
        timings_ms: cfg.timings.then_some(file_timings),
    })
}

/// Runs the configured selector. Stage timings cover loading and graph
/// construction too; `total` is end to end.
pub fn run_selection(cfg: &RunConfig) -> Result<(SelectionResult, Option<EmbeddingMatrix>)> {
    let start = Instant::now();
    let budget = cfg.require_budget()?;
    let mut timings = Timings::new();
    // With `--graph` alone the pool is skipped and ids are indices.
    let needs_pool = cfg.graph.is_none() || cfg.input.is_some() || cfg.method == Method::Subcluster;
    let pool = if needs_pool { Some(load_pool(cfg, &mut timings)?) } else { None };
    let graph = match cfg.method {
        Method::Subcluster => None,
        Method::Random if pool.is_some() => None,
        _ => Some(obtain_graph(cfg, pool.as_ref(), &mut timings)?),
    };
    if let (Some(p), Some(g)) = (&pool, &graph) {
        if p.n() != g.num_vertices() {
            return Err(Error::PartitionMismatch {
                expected: g.num_vertices(),
                found: p.n(),
            });
        }
    }
    let n = pool.as_ref().map_or_else(|| graph.as_ref().map_or(0, |g| g.num_vertices()), |p| p.n());
    if budget > n {
        return Err(Error::BudgetExceedsPool { budget, n });
    }

    let t = Instant::now();
    let mut result = match cfg.method {
        Method::Fastgas => {
            let parts = cfg.require_parts()?;
            let g = graph.as_ref().expect("graph loaded");
            fastgas_select_with(g, parts, budget, cfg.seed, &PartitionOptions::with_epsilon(cfg.epsilon))?
        }
        Method::Random => random_select(n, budget, cfg.seed)?,
        Method::TopDegree => top_degree_select(graph.as_ref().expect("graph loaded"), budget)?,
        Method::Pagerank => pagerank_select(graph.as_ref().expect("graph loaded"), budget, &cfg.pagerank)?,
        Method::Subcluster => {
            let parts = cfg.parts.unwrap_or(1);
            let pool = pool.as_ref().expect("pool loaded");
            subcluster_select(pool, parts, budget, cfg.seed, cfg.kmeans_iters)?
        }
    };
    if cfg.method != Method::Fastgas {
        result.timings.set("select", elapsed_ms(t));
    }
    timings.merge(&result.timings);
    timings.set("total", elapsed_ms(start));
    result.timings = timings;
    Ok((result, pool))
}

pub fn cmd_select(cfg: &RunConfig) -> Result<SelectionFile> {
    let (result, pool) = run_selection(cfg)?;
    Ok(result.to_file(pool.as_ref().map(|p| p.ids()), cfg.timings))
}

/// Reads a selection file written by `select`.
pub fn load_selection(path: impl AsRef<Path>) -> Result<SelectionFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format(e.line(), e.to_string()))
}

pub fn cmd_retrieve(cfg: &RunConfig) -> Result<RetrievalFile> {
    let selection_path = cfg
        .selection
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("a selection file is required (--selection)".into()))?;
    let tests_path = cfg
        .tests
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("a test embeddings file is required (--tests)".into()))?;
    let selection = load_selection(selection_path)?;
    let pool = load_pool(cfg, &mut Timings::new())?;
    let tests = load_embeddings(tests_path, format_for(cfg.format, tests_path))?;
    let plan = match cfg.mode {
        RetrievalMode::Similar => retrieve_similar(&pool, &selection.selected, &tests, cfg.m, cfg.order)?,
        RetrievalMode::Random => {
            if let Some(&v) = selection.selected.iter().find(|&&v| v >= pool.n()) {
                return Err(Error::IndexOutOfRange { index: v, len: pool.n() });
            }
            retrieve_random(&selection.selected, tests.n(), cfg.m, cfg.seed)?
        }
    };
    Ok(plan.to_file(pool.ids(), tests.ids()))
}

/// Pretty JSON plus a trailing newline, to `path` or stdout.
pub fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Invariant(format!("serialization failed: {e}")))?;
    text.push('\n');
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

/// Runs `f` on a dedicated pool when a thread count is configured.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("cannot start {n} threads: {e}")))?
            .install(f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ConfigLayer;
    use crate::embedding::{save_embeddings, SyntheticSpec};

    fn config(layer: ConfigLayer) -> RunConfig {
        RunConfig::resolve_with_env(None, &layer, None).unwrap()
    }

    fn synthetic(n: usize) -> Option<SyntheticSpec> {
        Some(SyntheticSpec::new(n, 8, 4, 0.2, 1))
    }

    #[test]
    fn select_every_method_on_a_synthetic_pool() {
        for method in Method::ALL {
            let cfg = config(ConfigLayer {
                synthetic: synthetic(200),
                budget: Some(12),
                parts: Some(4),
                method: Some(method),
                ..Default::default()
            });
            let file = cmd_select(&cfg).unwrap();
            assert_eq!(file.selected.len(), 12, "{method}");
            assert_eq!(file.selected_ids[0], format!("syn-{}", file.selected[0]));
            let t = file.timings_ms.unwrap();
            assert!(t.0.contains_key("total") && t.0.contains_key("select"), "{method}");
        }
    }

    #[test]
    fn no_timings_omits_the_section() {
        let cfg = config(ConfigLayer {
            synthetic: synthetic(100),
            budget: Some(5),
            parts: Some(2),
            timings: Some(false),
            ..Default::default()
        });
        let text = serde_json::to_string(&cmd_select(&cfg).unwrap()).unwrap();
        assert!(!text.contains("timings"));
        let text = serde_json::to_string(&cmd_partition(&cfg).unwrap()).unwrap();
        assert!(!text.contains("timings"));
    }

    #[test]
    fn graph_file_round_trip_gives_the_same_selection() {
        let dir = tempfile::tempdir().unwrap();
        let emb = dir.path().join("pool.bin");
        let pool = generate_synthetic(150, 8, 3, 0.2, 4).unwrap();
        save_embeddings(&pool, &emb, EmbeddingFormat::Binary).unwrap();
        let base = ConfigLayer {
            input: Some(emb.clone()),
            budget: Some(9),
            parts: Some(3),
            timings: Some(false),
            ..Default::default()
        };
        let (graph, report) = cmd_build_graph(&config(base.clone())).unwrap();
        assert_eq!(report.num_vertices, 150);
        let graph_path = dir.path().join("g.json");
        write_json(&graph, Some(&graph_path)).unwrap();

        let direct = cmd_select(&config(base.clone())).unwrap();
        let via_file = cmd_select(&config(ConfigLayer {
            graph: Some(graph_path),
            ..base
        }))
        .unwrap();
        assert_eq!(direct, via_file);
    }

    #[test]
    fn missing_parameters() {
        let cfg = config(ConfigLayer {
            synthetic: synthetic(50),
            ..Default::default()
        });
        assert_eq!(cmd_select(&cfg).unwrap_err().exit_code(), 2);
        assert_eq!(cmd_partition(&cfg).unwrap_err().exit_code(), 2);
        assert_eq!(cmd_retrieve(&cfg).unwrap_err().exit_code(), 2);
        let cfg = config(ConfigLayer {
            synthetic: synthetic(50),
            budget: Some(51),
            parts: Some(2),
            ..Default::default()
        });
        assert!(matches!(cmd_select(&cfg), Err(Error::BudgetExceedsPool { .. })));
        let cfg = config(ConfigLayer {
            input: Some("/nonexistent/pool.bin".into()),
            ..Default::default()
        });
        let err = cmd_build_graph(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("/nonexistent/pool.bin"));
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let cfg = config(ConfigLayer {
            synthetic: synthetic(400),
            budget: Some(20),
            parts: Some(5),
            timings: Some(false),
            ..Default::default()
        });
        let one = with_threads(Some(1), || cmd_select(&cfg)).unwrap();
        let four = with_threads(Some(4), || cmd_select(&cfg)).unwrap();
        assert_eq!(one, four);
    }
}
