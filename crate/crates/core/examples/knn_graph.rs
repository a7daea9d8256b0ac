//! Build the kNN cosine-similarity graph of a pool and inspect its shape.
//!
//!     cargo run --release --example knn_graph

use fastgas::{build_knn_graph, generate_synthetic};

fn main() -> fastgas::Result<()> {
    let pool = generate_synthetic(2000, 64, 8, 0.15, 1)?;
    for k in [5, 10, 20] {
        let start = std::time::Instant::now();
        let g = build_knn_graph(&pool, k)?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        let degrees: Vec<usize> = (0..g.num_vertices()).map(|v| g.neighbors(v).len()).collect();
        let min = degrees.iter().min().copied().unwrap_or(0);
        let max = degrees.iter().max().copied().unwrap_or(0);
        let mean = 2.0 * g.num_edges() as f64 / g.num_vertices() as f64;
        println!("k = {k:2}: |E| = {:6}, degree min {min} / mean {mean:.1} / max {max}, built in {ms:.0} ms", g.num_edges());
    }

    // The serialized form lists each undirected edge once as [u, v, weight] with u < v.
    let g = build_knn_graph(&pool, 10)?;
    let file = g.to_file(Some(10));
    println!("first edges: {:?}", &file.edges[..3]);
    assert_eq!(file.to_graph()?, g);
    Ok(())
}
