use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

/// Wall-clock milliseconds per named stage.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Timings(pub BTreeMap<String, f64>);

impl Timings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, stage: &str, ms: f64) {
        *self.0.entry(stage.to_string()).or_insert(0.0) += ms;
    }

    pub fn set(&mut self, stage: &str, ms: f64) {
        self.0.insert(stage.to_string(), ms);
    }

    pub fn get(&self, stage: &str) -> f64 {
        self.0.get(stage).copied().unwrap_or(0.0)
    }

    pub fn merge(&mut self, other: &Timings) {
        for (k, v) in &other.0 {
            self.add(k, *v);
        }
    }

    /// Runs `f`, adding its elapsed time to `stage`.
    pub fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.add(stage, elapsed_ms(start));
        out
    }
}

pub fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}
