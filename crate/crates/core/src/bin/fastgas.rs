use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fastgas::bench::{run_bench, write_bench_csv, BenchOptions};
use fastgas::config::{ConfigLayer, Preset, RunConfig};
use fastgas::pipeline::{cmd_build_graph, cmd_partition, cmd_retrieve, cmd_select, with_threads, write_json};
use fastgas::verify::{run_verify, VerifyOptions};
use fastgas::{EmbeddingFormat, Method, PromptOrder, Result, RetrievalMode};

#[derive(Parser)]
#[command(name = "fastgas", version, about = "Graph-based selective annotation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Command {
    /// Build the kNN similarity graph of an embedding pool.
    BuildGraph,
    /// Split a graph into K balanced parts.
    Partition,
    /// Pick the annotation subset.
    Select,
    /// Assign prompt examples from a selection to test instances.
    Retrieve,
    /// Time FastGAS and the baselines on synthetic pools of growing size.
    Bench(BenchArgs),
    /// Audit greedy selection against exhaustive search on small graphs.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Flags {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    preset: Option<Preset>,
    /// Pool embeddings (.jsonl or binary).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true)]
    format: Option<EmbeddingFormat>,
    /// Neighbors per vertex.
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Number of parts.
    #[arg(long = "K", global = true)]
    parts: Option<usize>,
    /// Annotation budget M.
    #[arg(long, visible_alias = "M", global = true)]
    budget: Option<usize>,
    /// Falls back to FASTGAS_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    #[arg(long, global = true)]
    method: Option<Method>,
    /// Graph JSON from build-graph, used instead of rebuilding.
    #[arg(long, global = true)]
    graph: Option<PathBuf>,
    /// Selection JSON from select.
    #[arg(long, global = true)]
    selection: Option<PathBuf>,
    /// Test-instance embeddings.
    #[arg(long, global = true)]
    tests: Option<PathBuf>,
    #[arg(long, global = true)]
    mode: Option<RetrievalMode>,
    /// Prompt examples per test instance.
    #[arg(long, global = true)]
    m: Option<usize>,
    #[arg(long, global = true)]
    order: Option<PromptOrder>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Leave timings out of outputs, making them byte-comparable.
    #[arg(long, global = true)]
    no_timings: bool,
    #[arg(long, global = true)]
    damping: Option<f64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    max_iters: Option<usize>,
    #[arg(long, global = true)]
    kmeans_iters: Option<usize>,
}

impl Flags {
    fn layer(&self) -> ConfigLayer {
        ConfigLayer {
            preset: self.preset,
            k: self.k,
            parts: self.parts,
            budget: self.budget,
            seed: self.seed,
            epsilon: self.epsilon,
            method: self.method,
            input: self.input.clone(),
            format: self.format,
            graph: self.graph.clone(),
            selection: self.selection.clone(),
            tests: self.tests.clone(),
            output: self.output.clone(),
            mode: self.mode,
            m: self.m,
            order: self.order,
            threads: self.threads,
            timings: self.no_timings.then_some(false),
            damping: self.damping,
            tol: self.tol,
            max_iters: self.max_iters,
            kmeans_iters: self.kmeans_iters,
            synthetic: None,
        }
    }
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated pool sizes.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    /// CSV report path; defaults to the output path with a .csv extension.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 12)]
    max_n: usize,
    #[arg(long, default_value_t = 4)]
    max_budget: usize,
    #[arg(long, default_value_t = 500)]
    instances: usize,
}

fn run(cli: Cli) -> Result<()> {
    let file = cli.flags.config.as_ref().map(ConfigLayer::load).transpose()?;
    let cfg = RunConfig::resolve(file.as_ref(), &cli.flags.layer())?;
    let out = cfg.output.as_deref();
    with_threads(cfg.threads, || match &cli.command {
        Command::BuildGraph => {
            let (graph, report) = cmd_build_graph(&cfg)?;
            eprintln!(
                "N = {}, |E| = {}, build = {:.1} ms",
                report.num_vertices,
                report.num_edges,
                report.timings_ms.get("knn")
            );
            write_json(&graph, out)
        }
        Command::Partition => write_json(&cmd_partition(&cfg)?, out),
        Command::Select => write_json(&cmd_select(&cfg)?, out),
        Command::Retrieve => write_json(&cmd_retrieve(&cfg)?, out),
        Command::Bench(args) => {
            let defaults = BenchOptions::default();
            let opts = BenchOptions {
                sizes: args.sizes.clone().unwrap_or(defaults.sizes),
                dim: args.dim.unwrap_or(defaults.dim),
                reps: args.reps.unwrap_or(defaults.reps),
                k: cfg.k,
                parts: cfg.parts.unwrap_or(defaults.parts),
                budget: cfg.budget.unwrap_or(defaults.budget),
                seed: cfg.seed,
                epsilon: cfg.epsilon,
                pagerank: cfg.pagerank,
                kmeans_iters: cfg.kmeans_iters,
                ..defaults
            };
            let report = run_bench(&opts)?;
            for s in &report.scaling {
                eprintln!(
                    "{} -> {}: fastgas {:.1} -> {:.1} ms (x{:.2} per doubling), with kNN x{:.2}",
                    s.from_n, s.to_n, s.algorithmic_ms[0], s.algorithmic_ms[1], s.ratio, s.end_to_end_ratio
                );
            }
            if let Some(csv) = args.csv.clone().or_else(|| out.map(|p| p.with_extension("csv"))) {
                write_bench_csv(&report, csv)?;
            }
            write_json(&report, out)
        }
        Command::Verify(args) => {
            let report = run_verify(&VerifyOptions {
                max_n: args.max_n,
                max_budget: args.max_budget,
                instances: args.instances,
                seed: cfg.seed,
                ..VerifyOptions::default()
            })?;
            eprintln!(
                "{} instances, exact optimum on {:.1}%, min ratio {:.4} (bound {:.4}), {} argmax violations",
                report.instances,
                100.0 * report.exact_pass_rate,
                report.min_ratio,
                report.bound,
                report.argmax_violations.len()
            );
            write_json(&report, out)
        }
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
