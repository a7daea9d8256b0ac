//! Every selector on the same graph: coverage reached and time taken.
//!
//!     cargo run --release --example baselines

use std::time::Instant;

use fastgas::select::{PageRankParams, DEFAULT_KMEANS_ITERS};
use fastgas::{
    build_knn_graph, coverage_objective, fastgas_select, generate_synthetic, greedy_select,
    pagerank_select, random_select, subcluster_select, top_degree_select, SelectionResult,
};

type Selector<'a> = Box<dyn Fn() -> fastgas::Result<SelectionResult> + 'a>;

fn main() -> fastgas::Result<()> {
    let pool = generate_synthetic(3000, 64, 10, 0.1, 7)?;
    let g = build_knn_graph(&pool, 10)?;
    let (budget, k, seed) = (100, 10, 0);

    let runs: Vec<(&str, Selector)> = vec![
        ("fastgas", Box::new(|| fastgas_select(&g, k, budget, seed))),
        ("random", Box::new(|| random_select(g.num_vertices(), budget, seed))),
        ("top-degree", Box::new(|| top_degree_select(&g, budget))),
        ("pagerank", Box::new(|| pagerank_select(&g, budget, &PageRankParams::default()))),
        ("subcluster", Box::new(|| subcluster_select(&pool, k, budget, seed, DEFAULT_KMEANS_ITERS))),
    ];
    for (name, run) in &runs {
        let start = Instant::now();
        let r = run()?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        println!("{name:>10}: coverage {:5}, {ms:8.2} ms", coverage_objective(&g, &r.selected)?);
    }

    // Whole-graph greedy, for reference: no partitioning at all.
    let start = Instant::now();
    let picks = greedy_select(&g, budget)?;
    println!(
        "{:>10}: coverage {:5}, {:8.2} ms",
        "greedy",
        coverage_objective(&g, &picks)?,
        start.elapsed().as_secs_f64() * 1e3
    );
    Ok(())
}
