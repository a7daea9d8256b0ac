//! Greedy residual-degree selection against exhaustive search on small
//! random graphs.
//!
//!     cargo run --release --example coverage_audit

use fastgas::verify::{run_verify, VerifyOptions};

fn main() -> fastgas::Result<()> {
    let report = run_verify(&VerifyOptions::default())?;
    println!(
        "{} graphs: greedy optimal on {} ({:.1}%), worst ratio {:.3} vs guaranteed {:.3}",
        report.instances,
        report.exact_optimal,
        100.0 * report.exact_pass_rate,
        report.min_ratio,
        report.bound
    );
    println!("argmax violations: {}", report.argmax_violations.len());
    if let Some(c) = report.counterexamples.first() {
        println!(
            "example shortfall ({}): n = {}, budget {}, edges {:?}\n  greedy {:?} covers {}, optimum {:?} covers {}",
            c.name, c.n, c.budget, c.edges, c.greedy, c.greedy_value, c.optimum, c.optimum_value
        );
    }
    Ok(())
}
