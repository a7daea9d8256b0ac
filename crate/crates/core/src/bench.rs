//! Selection-time benchmark over synthetic pools of growing size.
//!
//! For every pool size the harness builds one kNN graph, then runs FastGAS
//! and each baseline `reps` times on it (after one untimed warm-up run),
//! keeping per-stage medians. The
//! scaling figure is FastGAS's algorithmic time (partition + induce +
//! select) per doubling of `N`; the end-to-end figure adds kNN
//! construction, which is quadratic in `N` with the exact builder.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::embedding::generate_synthetic;
use crate::error::{Error, Result};
use crate::graph::build_knn_graph;
use crate::partition::{PartitionOptions, DEFAULT_EPSILON};
use crate::select::{
    fastgas_select_with, pagerank_select, random_select, subcluster_select, top_degree_select,
    Method, PageRankParams, SelectionResult, DEFAULT_KMEANS_ITERS,
};
use crate::timing::{elapsed_ms, Timings};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchOptions {
    pub sizes: Vec<usize>,
    pub dim: usize,
    pub clusters: usize,
    pub spread: f64,
    pub k: usize,
    #[serde(rename = "K")]
    pub parts: usize,
    pub budget: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub reps: usize,
    pub methods: Vec<Method>,
    pub pagerank: PageRankParams,
    pub kmeans_iters: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            sizes: vec![1000, 2000, 4000, 8000],
            dim: 64,
            clusters: 10,
            spread: 0.1,
            k: 10,
            parts: 10,
            budget: 100,
            seed: 0,
            epsilon: DEFAULT_EPSILON,
            reps: 7,
            methods: Method::ALL.to_vec(),
            pagerank: PageRankParams::default(),
            kmeans_iters: DEFAULT_KMEANS_ITERS,
        }
    }
}

/// One method on one pool size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRun {
    pub n: usize,
    pub num_edges: usize,
    pub method: Method,
    /// Per-stage medians over the repetitions.
    pub timings_ms: Timings,
    pub selected: Vec<usize>,
}

/// Time growth between consecutive sizes, normalized to one doubling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingStep {
    pub from_n: usize,
    pub to_n: usize,
    pub algorithmic_ms: [f64; 2],
    pub ratio: f64,
    pub end_to_end_ms: [f64; 2],
    pub end_to_end_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub options: BenchOptions,
    pub runs: Vec<BenchRun>,
    pub scaling: Vec<ScalingStep>,
    pub max_ratio: f64,
}

impl BenchReport {
    pub fn run(&self, n: usize, method: Method) -> Option<&BenchRun> {
        self.runs.iter().find(|r| r.n == n && r.method == method)
    }

    /// Selections only, for comparing reports across runs.
    pub fn selections(&self) -> Vec<(usize, Method, &[usize])> {
        self.runs.iter().map(|r| (r.n, r.method, r.selected.as_slice())).collect()
    }
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    match n {
        0 => 0.0,
        _ if n % 2 == 1 => values[n / 2],
        _ => 0.5 * (values[n / 2 - 1] + values[n / 2]),
    }
}

fn median_timings(all: &[Timings]) -> Timings {
    let mut out = Timings::new();
    for stage in all[0].0.keys() {
        let mut v: Vec<f64> = all.iter().map(|t| t.get(stage)).collect();
        out.set(stage, median(&mut v));
    }
    out
}

/// `(t2 / t1)` rescaled to a single doubling of `n`.
pub fn per_doubling(n1: usize, t1: f64, n2: usize, t2: f64) -> f64 {
    let doublings = (n2 as f64 / n1 as f64).log2();
    (t2 / t1).powf(1.0 / doublings)
}

pub fn run_bench(opts: &BenchOptions) -> Result<BenchReport> {
    if opts.sizes.is_empty() || opts.reps == 0 {
        return Err(Error::InvalidParameter("bench needs at least one size and one rep".into()));
    }
    if opts.sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("bench sizes must be strictly increasing".into()));
    }
    let part_opts = PartitionOptions::with_epsilon(opts.epsilon);
    let mut pools = Vec::with_capacity(opts.sizes.len());
    for &n in &opts.sizes {
        let pool = generate_synthetic(n, opts.dim, opts.clusters, opts.spread, opts.seed)?;
        let start = Instant::now();
        let g = build_knn_graph(&pool, opts.k)?;
        pools.push((pool, g, elapsed_ms(start)));
    }

    let cells = opts.sizes.len() * opts.methods.len();
    let mut samples: Vec<Vec<Timings>> = vec![Vec::with_capacity(opts.reps); cells];
    let mut selections: Vec<Option<Vec<usize>>> = vec![None; cells];
    // Repetitions go round-robin over sizes and methods so slow drift in
    // machine load hits every cell alike; repetition 0 is an untimed warm-up.
    for rep in 0..=opts.reps {
        for (si, (pool, g, knn_ms)) in pools.iter().enumerate() {
            let n = pool.n();
            for (mi, &method) in opts.methods.iter().enumerate() {
                let start = Instant::now();
                let result: SelectionResult = match method {
                    Method::Fastgas => {
                        fastgas_select_with(g, opts.parts, opts.budget, opts.seed, &part_opts)?
                    }
                    Method::Random => random_select(n, opts.budget, opts.seed)?,
                    Method::TopDegree => top_degree_select(g, opts.budget)?,
                    Method::Pagerank => pagerank_select(g, opts.budget, &opts.pagerank)?,
                    Method::Subcluster => {
                        subcluster_select(pool, opts.parts, opts.budget, opts.seed, opts.kmeans_iters)?
                    }
                };
                let total = elapsed_ms(start);
                let cell = si * opts.methods.len() + mi;
                match &selections[cell] {
                    None => selections[cell] = Some(result.selected.clone()),
                    Some(s) if *s != result.selected => {
                        return Err(Error::Invariant(format!(
                            "{method} selection changed between repetitions at n = {n}"
                        )))
                    }
                    Some(_) => {}
                }
                if rep == 0 {
                    continue;
                }
                let mut t = result.timings;
                if method != Method::Fastgas {
                    t.set("select", total);
                }
                t.set("total", total);
                t.set("knn", *knn_ms);
                t.set("end_to_end", knn_ms + total);
                samples[cell].push(t);
            }
        }
    }

    let mut runs = Vec::with_capacity(cells);
    for (si, (pool, g, _)) in pools.iter().enumerate() {
        for (mi, &method) in opts.methods.iter().enumerate() {
            let cell = si * opts.methods.len() + mi;
            runs.push(BenchRun {
                n: pool.n(),
                num_edges: g.num_edges(),
                method,
                timings_ms: median_timings(&samples[cell]),
                selected: selections[cell].take().unwrap_or_default(),
            });
        }
    }

    let mut scaling = Vec::new();
    if opts.methods.contains(&Method::Fastgas) {
        let fg: Vec<&BenchRun> = runs.iter().filter(|r| r.method == Method::Fastgas).collect();
        for w in fg.windows(2) {
            let (a, b) = (w[0], w[1]);
            let alg = [a.timings_ms.get("total"), b.timings_ms.get("total")];
            let e2e = [a.timings_ms.get("end_to_end"), b.timings_ms.get("end_to_end")];
            scaling.push(ScalingStep {
                from_n: a.n,
                to_n: b.n,
                algorithmic_ms: alg,
                ratio: per_doubling(a.n, alg[0], b.n, alg[1]),
                end_to_end_ms: e2e,
                end_to_end_ratio: per_doubling(a.n, e2e[0], b.n, e2e[1]),
            });
        }
    }
    let max_ratio = scaling.iter().map(|s| s.ratio).fold(0.0, f64::max);
    Ok(BenchReport {
        options: opts.clone(),
        runs,
        scaling,
        max_ratio,
    })
}

#[derive(Serialize)]
struct CsvRow<'a> {
    n: usize,
    method: &'a str,
    stage: &'a str,
    ms: f64,
}

/// Long-format CSV: one `n,method,stage,ms` row per stage of every run.
pub fn write_bench_csv(report: &BenchReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let to_err = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Invariant(format!("csv serialization failed: {other:?}")),
    };
    let mut w = csv::Writer::from_path(path).map_err(to_err)?;
    for run in &report.runs {
        for (stage, &ms) in &run.timings_ms.0 {
            w.serialize(CsvRow {
                n: run.n,
                method: run.method.as_str(),
                stage,
                ms,
            })
            .map_err(to_err)?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn medians() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(median(&mut []), 0.0);
    }

    #[test]
    fn doubling_normalization() {
        assert!((per_doubling(1000, 1.0, 2000, 2.0) - 2.0).abs() < 1e-12);
        assert!((per_doubling(1000, 1.0, 4000, 4.0) - 2.0).abs() < 1e-12);
        assert!((per_doubling(1000, 1.0, 4000, 16.0) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn small_report_is_complete_and_repeatable() {
        let opts = BenchOptions {
            sizes: vec![200, 400],
            dim: 8,
            budget: 20,
            parts: 4,
            reps: 2,
            ..Default::default()
        };
        let a = run_bench(&opts).unwrap();
        assert_eq!(a.runs.len(), 2 * Method::ALL.len());
        assert_eq!(a.scaling.len(), 1);
        for run in &a.runs {
            assert_eq!(run.selected.len(), 20);
            assert!(run.timings_ms.0.contains_key("knn"));
        }
        let b = run_bench(&opts).unwrap();
        assert_eq!(a.selections(), b.selections());

        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("bench.csv");
        write_bench_csv(&a, &csv_path).unwrap();
        let text = std::fs::read_to_string(&csv_path).unwrap();
        assert!(text.starts_with("n,method,stage,ms\n"));
        assert!(text.contains("400,subcluster,select,"));
    }

    #[test]
    fn rejects_bad_sizes() {
        let opts = BenchOptions {
            sizes: vec![400, 200],
            ..Default::default()
        };
        assert!(matches!(run_bench(&opts), Err(Error::InvalidParameter(_))));
    }
}
