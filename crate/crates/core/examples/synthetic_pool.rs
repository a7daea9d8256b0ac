//! Generate a labeled synthetic pool, write it in both on-disk formats and
//! read it back.
//!
//!     cargo run --release --example synthetic_pool

use fastgas::{
    generate_synthetic_labeled, load_embeddings, save_embeddings, EmbeddingFormat, SyntheticSpec,
};

fn main() -> fastgas::Result<()> {
    let pool = generate_synthetic_labeled(SyntheticSpec::new(3000, 768, 10, 0.1, 7))?;
    let m = &pool.matrix;
    println!("pool: {} x {}, first id {:?}, label of row 13 = {}", m.n(), m.dim(), m.ids()[0], pool.labels[13]);

    let dir = std::env::temp_dir().join("fastgas-example");
    std::fs::create_dir_all(&dir).map_err(|e| fastgas::Error::Invariant(e.to_string()))?;
    for (format, name) in [(EmbeddingFormat::Binary, "pool.bin"), (EmbeddingFormat::Jsonl, "pool.jsonl")] {
        let path = dir.join(name);
        save_embeddings(m, &path, format)?;
        let start = std::time::Instant::now();
        let back = load_embeddings(&path, format)?;
        let bytes = std::fs::metadata(&path).map(|md| md.len()).unwrap_or(0);
        println!(
            "{format:?}: {bytes} bytes, loaded in {:.1} ms, identical = {}",
            start.elapsed().as_secs_f64() * 1e3,
            back == *m
        );
    }
    Ok(())
}
