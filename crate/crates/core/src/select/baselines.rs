use super::{Method, SelectionResult};
use crate::error::{Error, Result};
use crate::graph::SimilarityGraph;
use crate::rng;

/// Uniform sample of `budget` indices from `0..pool_size`, without replacement.
pub fn random_select(pool_size: usize, budget: usize, seed: u64) -> Result<SelectionResult> {
    if budget > pool_size {
        return Err(Error::BudgetExceedsPool {
            budget,
            n: pool_size,
        });
    }
    let mut r = rng::stream(seed, &[]);
    let picks = rand::seq::index::sample(&mut r, pool_size, budget).into_vec();
    Ok(SelectionResult::flat(Method::Random, budget, Some(seed), picks))
}

/// The `budget` vertices of highest static degree, lowest index on ties.
pub fn top_degree_select(g: &SimilarityGraph, budget: usize) -> Result<SelectionResult> {
    let n = g.num_vertices();
    if budget > n {
        return Err(Error::BudgetExceedsPool { budget, n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| g.degree_of(b).cmp(&g.degree_of(a)).then(a.cmp(&b)));
    order.truncate(budget);
    Ok(SelectionResult::flat(Method::TopDegree, budget, None, order))
}
