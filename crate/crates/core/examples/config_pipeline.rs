//! The CLI's layers without the CLI: resolve a configuration from a preset
//! plus overrides, then run the select and partition commands.
//!
//!     cargo run --release --example config_pipeline

use fastgas::config::{ConfigLayer, Preset, RunConfig};
use fastgas::pipeline::{cmd_partition, cmd_select};

fn main() -> fastgas::Result<()> {
    // Same as `fastgas select --preset paper-18 --seed 3 --no-timings`.
    let file: ConfigLayer = serde_json::from_str(r#"{"epsilon": 0.03, "seed": 1}"#)
        .map_err(|e| fastgas::Error::InvalidParameter(e.to_string()))?;
    let flags = ConfigLayer {
        preset: Some(Preset::Paper18),
        seed: Some(3),
        timings: Some(false),
        ..ConfigLayer::default()
    };
    let cfg = RunConfig::resolve_with_env(Some(&file), &flags, None)?;
    println!("k = {}, K = {:?}, M = {:?}, seed = {}", cfg.k, cfg.parts, cfg.budget, cfg.seed);

    let selection = cmd_select(&cfg)?;
    println!("selected ids: {:?}", selection.selected_ids);
    let partition = cmd_partition(&cfg)?;
    println!("part sizes {:?}, cut {}", partition.part_sizes, partition.cut);
    Ok(())
}
