//! Selection strategies: the partition-then-greedy selector, its coverage
//! oracle, and the random / top-degree / PageRank / sub-clustering baselines.

mod baselines;
mod fastgas;
mod greedy;
mod kmeans;
mod pagerank;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use baselines::{random_select, top_degree_select};
pub use fastgas::{fastgas_select, fastgas_select_with};
pub use greedy::{
    brute_force_max_coverage, coverage_objective, greedy_select, greedy_select_traced,
    MAX_BRUTE_FORCE_VERTICES,
};
pub use kmeans::{kmeans, subcluster_select, KMeans, DEFAULT_KMEANS_ITERS};
pub use pagerank::{pagerank_scores, pagerank_select, PageRankParams};

use crate::error::{Error, Result};
use crate::timing::Timings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Fastgas,
    Random,
    TopDegree,
    Pagerank,
    Subcluster,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Fastgas,
        Method::Random,
        Method::TopDegree,
        Method::Pagerank,
        Method::Subcluster,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Fastgas => "fastgas",
            Method::Random => "random",
            Method::TopDegree => "top-degree",
            Method::Pagerank => "pagerank",
            Method::Subcluster => "subcluster",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown method {s:?} (expected fastgas, random, top-degree, pagerank or subcluster)"
                ))
            })
    }
}

/// The selected subset `L`, in pick order.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub method: Method,
    pub budget: usize,
    pub parts: Option<usize>,
    pub seed: Option<u64>,
    pub selected: Vec<usize>,
    /// Picks of each part (or top-level cluster), in pick order.
    pub per_part: BTreeMap<usize, Vec<usize>>,
    pub timings: Timings,
}

impl SelectionResult {
    pub(crate) fn flat(method: Method, budget: usize, seed: Option<u64>, selected: Vec<usize>) -> Self {
        Self {
            method,
            budget,
            parts: None,
            seed,
            selected,
            per_part: BTreeMap::new(),
            timings: Timings::new(),
        }
    }

    pub fn to_file(&self, ids: Option<&[String]>, with_timings: bool) -> SelectionFile {
        SelectionFile {
            method: self.method,
            budget: self.budget,
            k: self.parts,
            seed: self.seed,
            selected: self.selected.clone(),
            selected_ids: self
                .selected
                .iter()
                .map(|&v| ids.map_or_else(|| v.to_string(), |ids| ids[v].clone()))
                .collect(),
            per_part: self.per_part.clone(),
            timings_ms: with_timings.then(|| self.timings.clone()),
        }
    }
}

/// Selection output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionFile {
    pub method: Method,
    pub budget: usize,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    pub seed: Option<u64>,
    pub selected: Vec<usize>,
    pub selected_ids: Vec<String>,
    pub per_part: BTreeMap<usize, Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings_ms: Option<Timings>,
}

/// Splits `budget` over parts of the given sizes.
///
/// Every part gets `budget / K`; the remainder goes one each to the largest
/// parts (lowest index on ties). A quota above its part's size is capped and
/// the overflow handed to the largest parts that still have room.
pub fn allocate_quotas(sizes: &[usize], budget: usize) -> Result<Vec<usize>> {
    let k = sizes.len();
    let total: usize = sizes.iter().sum();
    if k == 0 {
        return Err(Error::InvalidParts { parts: 0, n: total });
    }
    if budget > total {
        return Err(Error::BudgetExceedsPool { budget, n: total });
    }
    let mut by_size: Vec<usize> = (0..k).collect();
    by_size.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));

    let mut quotas = vec![budget / k; k];
    for &p in by_size.iter().take(budget % k) {
        quotas[p] += 1;
    }
    let mut overflow = 0;
    for (q, &s) in quotas.iter_mut().zip(sizes) {
        if *q > s {
            overflow += *q - s;
            *q = s;
        }
    }
    for &p in &by_size {
        if overflow == 0 {
            break;
        }
        let take = (sizes[p] - quotas[p]).min(overflow);
        quotas[p] += take;
        overflow -= take;
    }
    Ok(quotas)
}
