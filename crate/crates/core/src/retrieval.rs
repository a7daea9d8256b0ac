//! Prompt-example retrieval from the selected subset.

use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{cosine_similarity, EmbeddingMatrix};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RetrievalMode {
    Similar,
    Random,
}

/// In-prompt order of similarity-ranked examples.
///
/// `Asc` places the most similar example last, right before the test input.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PromptOrder {
    #[default]
    Asc,
    Desc,
}

impl FromStr for RetrievalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "similar" => Ok(RetrievalMode::Similar),
            "random" => Ok(RetrievalMode::Random),
            other => Err(Error::InvalidParameter(format!(
                "unknown retrieval mode {other:?} (expected similar or random)"
            ))),
        }
    }
}

impl FromStr for PromptOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "asc" => Ok(PromptOrder::Asc),
            "desc" => Ok(PromptOrder::Desc),
            other => Err(Error::InvalidParameter(format!(
                "unknown order {other:?} (expected asc or desc)"
            ))),
        }
    }
}

impl fmt::Display for PromptOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PromptOrder::Asc => "asc",
            PromptOrder::Desc => "desc",
        })
    }
}

/// Prompt examples for every test instance, as pool indices in prompt order.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalPlan {
    pub mode: RetrievalMode,
    pub m: usize,
    pub order: PromptOrder,
    pub per_test: Vec<Vec<usize>>,
}

/// Retrieval output file: `per_test` maps test id to selected ids, in test order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalFile {
    pub mode: RetrievalMode,
    pub m: usize,
    pub order: PromptOrder,
    pub per_test: IndexMap<String, Vec<String>>,
}

impl RetrievalPlan {
    pub fn to_file(&self, pool_ids: &[String], test_ids: &[String]) -> RetrievalFile {
        RetrievalFile {
            mode: self.mode,
            m: self.m,
            order: self.order,
            per_test: test_ids
                .iter()
                .zip(&self.per_test)
                .map(|(t, list)| (t.clone(), list.iter().map(|&v| pool_ids[v].clone()).collect()))
                .collect(),
        }
    }
}

/// Ranks the selected instances by cosine similarity to each test vector
/// (lower pool index on ties), keeps the top `m`, and emits them in `order`.
pub fn retrieve_similar(
    pool: &EmbeddingMatrix,
    selected: &[usize],
    tests: &EmbeddingMatrix,
    m: usize,
    order: PromptOrder,
) -> Result<RetrievalPlan> {
    if selected.is_empty() {
        return Err(Error::EmptySelection);
    }
    if m == 0 {
        return Err(Error::InvalidParameter("m must be >= 1".into()));
    }
    if pool.dim() != tests.dim() {
        return Err(Error::DimensionMismatch {
            expected: pool.dim(),
            found: tests.dim(),
        });
    }
    if let Some(&v) = selected.iter().find(|&&v| v >= pool.n()) {
        return Err(Error::IndexOutOfRange {
            index: v,
            len: pool.n(),
        });
    }
    let take = m.min(selected.len());
    let per_test = (0..tests.n())
        .into_par_iter()
        .map(|t| {
            let query = tests.row(t);
            let mut ranked = selected
                .iter()
                .map(|&v| cosine_similarity(query, pool.row(v)).map(|s| (s, v)))
                .collect::<Result<Vec<_>>>()?;
            ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            ranked.truncate(take);
            let mut list: Vec<usize> = ranked.into_iter().map(|(_, v)| v).collect();
            if order == PromptOrder::Asc {
                list.reverse();
            }
            Ok(list)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RetrievalPlan {
        mode: RetrievalMode::Similar,
        m,
        order,
        per_test,
    })
}

/// Uniform draws of `min(m, |selected|)` selected instances per test, in
/// draw order. Test `t` uses the stream derived from `(seed, t)`.
pub fn retrieve_random(selected: &[usize], tests: usize, m: usize, seed: u64) -> Result<RetrievalPlan> {
    if selected.is_empty() {
        return Err(Error::EmptySelection);
    }
    if m == 0 {
        return Err(Error::InvalidParameter("m must be >= 1".into()));
    }
    let take = m.min(selected.len());
    let per_test = (0..tests)
        .map(|t| {
            let mut r = rng::stream(seed, &[t as u64]);
            rand::seq::index::sample(&mut r, selected.len(), take)
                .into_iter()
                .map(|i| selected[i])
                .collect()
        })
        .collect();
    Ok(RetrievalPlan {
        mode: RetrievalMode::Random,
        m,
        order: PromptOrder::Asc,
        per_test,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::generate_synthetic;

    #[test]
    fn identical_vector_is_retrieved() {
        let pool = generate_synthetic(30, 5, 3, 0.5, 1).unwrap();
        let tests = EmbeddingMatrix::from_rows(vec!["t".into()], vec![pool.row(7).to_vec()]).unwrap();
        let plan = retrieve_similar(&pool, &[3, 7, 12], &tests, 1, PromptOrder::Asc).unwrap();
        assert_eq!(plan.per_test, vec![vec![7]]);
    }

    #[test]
    fn large_m_returns_every_selected_in_order() {
        let pool = generate_synthetic(30, 5, 3, 0.5, 1).unwrap();
        let tests = generate_synthetic(4, 5, 2, 0.5, 2).unwrap();
        let sel = [1, 4, 9, 20];
        let asc = retrieve_similar(&pool, &sel, &tests, 10, PromptOrder::Asc).unwrap();
        let desc = retrieve_similar(&pool, &sel, &tests, 10, PromptOrder::Desc).unwrap();
        for (t, (a, d)) in asc.per_test.iter().zip(&desc.per_test).enumerate() {
            let mut sorted = a.clone();
            sorted.sort();
            assert_eq!(sorted, sel);
            let sims: Vec<f64> = a
                .iter()
                .map(|&v| cosine_similarity(tests.row(t), pool.row(v)).unwrap())
                .collect();
            assert!(sims.windows(2).all(|w| w[0] <= w[1]));
            let mut rev = d.clone();
            rev.reverse();
            assert_eq!(&rev, a);
        }
    }

    #[test]
    fn errors() {
        let pool = generate_synthetic(10, 3, 1, 0.5, 1).unwrap();
        let tests = generate_synthetic(2, 4, 1, 0.5, 1).unwrap();
        assert!(matches!(
            retrieve_similar(&pool, &[], &pool, 1, PromptOrder::Asc),
            Err(Error::EmptySelection)
        ));
        assert!(matches!(
            retrieve_similar(&pool, &[1], &tests, 1, PromptOrder::Asc),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(retrieve_random(&[], 3, 1, 0), Err(Error::EmptySelection)));
    }

    #[test]
    fn random_plans() {
        let sel = [2, 5, 8];
        let plan = retrieve_random(&sel, 4, 5, 1).unwrap();
        for list in &plan.per_test {
            let mut s = list.clone();
            s.sort();
            assert_eq!(s, sel);
        }
        assert_eq!(plan, retrieve_random(&sel, 4, 5, 1).unwrap());

        let sel: Vec<usize> = (0..20).collect();
        let differing = (0..100)
            .filter(|&seed| {
                let p = retrieve_random(&sel, 2, 3, seed).unwrap();
                p.per_test[0] != p.per_test[1]
            })
            .count();
        assert!(differing >= 95, "{differing}");
    }

    #[test]
    fn file_keeps_test_order() {
        let plan = RetrievalPlan {
            mode: RetrievalMode::Similar,
            m: 1,
            order: PromptOrder::Asc,
            per_test: vec![vec![1], vec![0]],
        };
        let f = plan.to_file(&["a".into(), "b".into()], &["z".into(), "y".into()]);
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(
            text,
            r#"{"mode":"similar","m":1,"order":"asc","per_test":{"z":["b"],"y":["a"]}}"#
        );
    }
}
