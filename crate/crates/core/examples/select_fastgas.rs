//! Partition-then-greedy selection with per-part quotas.
//!
//!     cargo run --release --example select_fastgas

use fastgas::{build_knn_graph, coverage_objective, fastgas_select, generate_synthetic};

fn main() -> fastgas::Result<()> {
    let pool = generate_synthetic(3000, 64, 10, 0.1, 7)?;
    let g = build_knn_graph(&pool, 10)?;

    for (k, budget) in [(6, 18), (3, 10), (10, 100)] {
        let r = fastgas_select(&g, k, budget, 0)?;
        let quotas: Vec<usize> = r.per_part.values().map(Vec::len).collect();
        println!(
            "K = {k:2}, M = {budget:3}: quotas {quotas:?}, covers {} of {} edges, partition {:.1} ms + select {:.2} ms",
            coverage_objective(&g, &r.selected)?,
            g.num_edges(),
            r.timings.get("partition_total"),
            r.timings.get("select")
        );
    }

    let r = fastgas_select(&g, 6, 18, 0)?;
    for (part, picks) in &r.per_part {
        let ids: Vec<&str> = picks.iter().map(|&v| pool.ids()[v].as_str()).collect();
        println!("part {part}: {ids:?}");
    }
    Ok(())
}
