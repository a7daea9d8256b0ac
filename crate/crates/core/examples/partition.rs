//! Multilevel K-way partitioning: balance, edge cut and the per-level trace
//! of the root bisection.
//!
//!     cargo run --release --example partition

use fastgas::partition::{part_capacity, partition_kway_with, PartitionOptions};
use fastgas::{build_knn_graph, generate_synthetic_labeled, SyntheticSpec};

fn main() -> fastgas::Result<()> {
    let pool = generate_synthetic_labeled(SyntheticSpec::new(600, 32, 6, 0.1, 3))?;
    let g = build_knn_graph(&pool.matrix, 10)?;
    let planted_cut = g.edges().filter(|&(u, v, _)| pool.labels[u] != pool.labels[v]).count();

    for k in [2, 3, 6, 9] {
        let out = partition_kway_with(&g, k, 0, &PartitionOptions::default())?;
        println!(
            "K = {k}: cut {:4}, sizes {:?} (cap {}), {:.1} ms",
            out.cut,
            out.partition.part_sizes(),
            part_capacity(g.num_vertices(), k, 0.03),
            out.timings.get("partition_total")
        );
    }
    println!("planted 6-cluster cut: {planted_cut}");

    let out = partition_kway_with(&g, 6, 0, &PartitionOptions::default())?;
    let (_, root) = &out.reports[0];
    println!("root bisection, coarsest level first:");
    for lvl in &root.levels {
        println!(
            "  level {} ({:3} vertices): projected cut {:4}, after refinement {:4}",
            lvl.level,
            lvl.num_vertices,
            lvl.projected_cut,
            lvl.refine.cuts.last().copied().unwrap_or(lvl.cut_before_refine)
        );
    }
    Ok(())
}
