//! Selection time as the pool doubles, for FastGAS and every baseline.
//!
//!     cargo run --release --example scaling_bench

use fastgas::bench::{run_bench, BenchOptions};

fn main() -> fastgas::Result<()> {
    let report = run_bench(&BenchOptions {
        sizes: vec![1000, 2000, 4000],
        reps: 3,
        ..BenchOptions::default()
    })?;
    println!("{:>6} {:>11} {:>10} {:>10}", "n", "method", "select ms", "total ms");
    for run in &report.runs {
        println!(
            "{:>6} {:>11} {:>10.2} {:>10.2}",
            run.n,
            run.method.as_str(),
            run.timings_ms.get("select"),
            run.timings_ms.get("total")
        );
    }
    for s in &report.scaling {
        println!(
            "{} -> {}: FastGAS x{:.2} per doubling (x{:.2} including kNN)",
            s.from_n, s.to_n, s.ratio, s.end_to_end_ratio
        );
    }
    Ok(())
}
