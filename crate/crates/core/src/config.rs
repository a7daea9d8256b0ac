//! Run configuration.
//!
//! Values are layered, later layers winning: built-in defaults, the
//! `FASTGAS_SEED` environment variable, a preset, a JSON config file, and
//! finally command-line flags. Every layer is a [`ConfigLayer`] whose unset
//! fields leave the value below untouched.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::embedding::{EmbeddingFormat, SyntheticSpec};
use crate::error::{Error, Result};
use crate::partition::DEFAULT_EPSILON;
use crate::retrieval::{PromptOrder, RetrievalMode};
use crate::select::{Method, PageRankParams, DEFAULT_KMEANS_ITERS};

pub const DEFAULT_KNN: usize = 10;
pub const DEFAULT_PROMPT_EXAMPLES: usize = 8;
pub const SEED_ENV: &str = "FASTGAS_SEED";

/// Named settings matching the published experiments: a synthetic pool of
/// 3000 instances (768-dimensional), `k = 10`, and budget 18 (`K = 6`) or
/// 100 (`K = 10`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    #[serde(rename = "paper-18")]
    Paper18,
    #[serde(rename = "paper-100")]
    Paper100,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-18" => Ok(Preset::Paper18),
            "paper-100" => Ok(Preset::Paper100),
            other => Err(Error::InvalidParameter(format!(
                "unknown preset {other:?} (expected paper-18 or paper-100)"
            ))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Paper18 => "paper-18",
            Preset::Paper100 => "paper-100",
        })
    }
}

impl Preset {
    pub fn layer(self) -> ConfigLayer {
        let (budget, parts) = match self {
            Preset::Paper18 => (18, 6),
            Preset::Paper100 => (100, 10),
        };
        ConfigLayer {
            k: Some(DEFAULT_KNN),
            parts: Some(parts),
            budget: Some(budget),
            method: Some(Method::Fastgas),
            synthetic: Some(SyntheticSpec::new(3000, 768, 10, 0.1, 0)),
            ..ConfigLayer::default()
        }
    }
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    /// Neighbors per vertex in the kNN graph.
    pub k: usize,
    /// Partition count `K`.
    #[serde(rename = "K")]
    pub parts: Option<usize>,
    /// Annotation budget `M`.
    pub budget: Option<usize>,
    pub seed: u64,
    pub epsilon: f64,
    pub method: Method,
    pub input: Option<PathBuf>,
    /// Embedding format; guessed from the file extension when unset.
    pub format: Option<EmbeddingFormat>,
    /// Pool used when no `input` is given.
    pub synthetic: Option<SyntheticSpec>,
    pub graph: Option<PathBuf>,
    pub selection: Option<PathBuf>,
    pub tests: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub mode: RetrievalMode,
    /// Prompt examples per test instance.
    pub m: usize,
    pub order: PromptOrder,
    pub threads: Option<usize>,
    /// Include the timings section in outputs.
    pub timings: bool,
    pub pagerank: PageRankParams,
    pub kmeans_iters: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            k: DEFAULT_KNN,
            parts: None,
            budget: None,
            seed: 0,
            epsilon: DEFAULT_EPSILON,
            method: Method::Fastgas,
            input: None,
            format: None,
            synthetic: None,
            graph: None,
            selection: None,
            tests: None,
            output: None,
            mode: RetrievalMode::Similar,
            m: DEFAULT_PROMPT_EXAMPLES,
            order: PromptOrder::Asc,
            threads: None,
            timings: true,
            pagerank: PageRankParams::default(),
            kmeans_iters: DEFAULT_KMEANS_ITERS,
        }
    }
}

/// One layer of settings; `None` means "not set here".
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigLayer {
    pub preset: Option<Preset>,
    pub k: Option<usize>,
    #[serde(rename = "K")]
    pub parts: Option<usize>,
    #[serde(alias = "M")]
    pub budget: Option<usize>,
    pub seed: Option<u64>,
    pub epsilon: Option<f64>,
    pub method: Option<Method>,
    pub input: Option<PathBuf>,
    pub format: Option<EmbeddingFormat>,
    pub synthetic: Option<SyntheticSpec>,
    pub graph: Option<PathBuf>,
    pub selection: Option<PathBuf>,
    pub tests: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub mode: Option<RetrievalMode>,
    pub m: Option<usize>,
    pub order: Option<PromptOrder>,
    pub threads: Option<usize>,
    pub timings: Option<bool>,
    pub damping: Option<f64>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub kmeans_iters: Option<usize>,
}

impl ConfigLayer {
    /// Reads a JSON config file. Unknown keys are rejected.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::format(e.line(), e.to_string()))
    }

    pub fn apply(&self, cfg: &mut RunConfig) {
        macro_rules! set {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if let Some(v) = self.$field.clone() { $target = v; })*
            };
        }
        set! {
            k => cfg.k,
            seed => cfg.seed,
            epsilon => cfg.epsilon,
            method => cfg.method,
            mode => cfg.mode,
            m => cfg.m,
            order => cfg.order,
            timings => cfg.timings,
            damping => cfg.pagerank.damping,
            tol => cfg.pagerank.tol,
            max_iters => cfg.pagerank.max_iters,
            kmeans_iters => cfg.kmeans_iters,
        }
        macro_rules! set_opt {
            ($($field:ident),* $(,)?) => {
                $(if self.$field.is_some() { cfg.$field = self.$field.clone(); })*
            };
        }
        set_opt!(parts, budget, input, format, synthetic, graph, selection, tests, output, threads);
    }
}

impl RunConfig {
    /// Resolves flags over an optional config file, reading the seed
    /// fallback from the environment.
    pub fn resolve(file: Option<&ConfigLayer>, flags: &ConfigLayer) -> Result<Self> {
        Self::resolve_with_env(file, flags, std::env::var(SEED_ENV).ok().as_deref())
    }

    pub fn resolve_with_env(
        file: Option<&ConfigLayer>,
        flags: &ConfigLayer,
        env_seed: Option<&str>,
    ) -> Result<Self> {
        let mut cfg = RunConfig::default();
        if let Some(s) = env_seed {
            cfg.seed = s.trim().parse().map_err(|_| {
                Error::InvalidParameter(format!("{SEED_ENV}={s:?} is not a 64-bit unsigned integer"))
            })?;
        }
        if let Some(preset) = flags.preset.or(file.and_then(|f| f.preset)) {
            preset.layer().apply(&mut cfg);
        }
        if let Some(file) = file {
            file.apply(&mut cfg);
        }
        flags.apply(&mut cfg);
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parameter checks that do not need the data.
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be >= 1".into()));
        }
        if self.parts == Some(0) {
            return Err(Error::InvalidParameter("K must be >= 1".into()));
        }
        if self.budget == Some(0) {
            return Err(Error::InvalidParameter("budget must be >= 1".into()));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be a finite non-negative number, got {}",
                self.epsilon
            )));
        }
        if self.m == 0 {
            return Err(Error::InvalidParameter("m must be >= 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidParameter("threads must be >= 1".into()));
        }
        let p = &self.pagerank;
        if !(0.0..1.0).contains(&p.damping) || p.tol.is_nan() || p.tol <= 0.0 || p.max_iters == 0 {
            return Err(Error::InvalidParameter(format!(
                "PageRank needs 0 <= damping < 1, tol > 0, max_iters >= 1 (got {}, {}, {})",
                p.damping, p.tol, p.max_iters
            )));
        }
        Ok(())
    }

    pub fn require_budget(&self) -> Result<usize> {
        self.budget
            .ok_or_else(|| Error::InvalidParameter("a budget is required (--budget)".into()))
    }

    pub fn require_parts(&self) -> Result<usize> {
        self.parts
            .ok_or_else(|| Error::InvalidParameter("a partition count is required (--K)".into()))
    }
}
