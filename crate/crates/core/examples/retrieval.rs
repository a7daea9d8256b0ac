//! Prompt retrieval from a selected subset: by similarity and at random.
//!
//!     cargo run --release --example retrieval

use fastgas::{
    build_knn_graph, cosine_similarity, fastgas_select, generate_synthetic, retrieve_random,
    retrieve_similar, PromptOrder,
};

fn main() -> fastgas::Result<()> {
    let pool = generate_synthetic(1000, 32, 5, 0.2, 11)?;
    let tests = generate_synthetic(3, 32, 3, 0.2, 12)?;
    let g = build_knn_graph(&pool, 10)?;
    let selection = fastgas_select(&g, 5, 20, 0)?;

    let plan = retrieve_similar(&pool, &selection.selected, &tests, 4, PromptOrder::Asc)?;
    for (t, list) in plan.per_test.iter().enumerate() {
        let sims: Vec<String> = list
            .iter()
            .map(|&v| format!("{:.3}", cosine_similarity(tests.row(t), pool.row(v)).unwrap_or(f64::NAN)))
            .collect();
        println!("test {t}: examples {list:?}, similarity {sims:?} (most similar last)");
    }

    let random = retrieve_random(&selection.selected, tests.n(), 4, 0)?;
    println!("random plan: {:?}", random.per_test);

    let file = plan.to_file(pool.ids(), tests.ids());
    println!("{}", serde_json::to_string_pretty(&file).unwrap_or_default());
    Ok(())
}
