use serde::{Deserialize, Serialize};

use super::{Method, SelectionResult};
use crate::error::{Error, Result};
use crate::graph::SimilarityGraph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PageRankParams {
    pub damping: f64,
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for PageRankParams {
    fn default() -> Self {
        Self {
            damping: 0.85,
            tol: 1e-10,
            max_iters: 200,
        }
    }
}

/// Hitting `max_iters` is only an error above this L1 change.
const CONVERGENCE_FLOOR: f64 = 1e-6;

/// Power iteration with uniform teleport; mass on isolated vertices is
/// spread uniformly. Stops when the L1 change drops below `tol`.
pub fn pagerank_scores(g: &SimilarityGraph, params: &PageRankParams) -> Result<Vec<f64>> {
    let n = g.num_vertices();
    if n == 0 {
        return Ok(Vec::new());
    }
    let d = params.damping;
    let uniform = 1.0 / n as f64;
    let out_weight: Vec<f64> = (0..n)
        .map(|v| g.edge_weights(v).iter().sum::<u64>() as f64)
        .collect();
    let mut rank = vec![uniform; n];
    let mut next = vec![0.0; n];
    let mut delta = f64::INFINITY;
    for _ in 0..params.max_iters {
        let dangling: f64 = (0..n).filter(|&v| out_weight[v] == 0.0).map(|v| rank[v]).sum();
        let base = (1.0 - d) * uniform + d * dangling * uniform;
        for (v, slot) in next.iter_mut().enumerate() {
            let inflow: f64 = g
                .adjacency(v)
                .map(|(u, w)| rank[u] * w as f64 / out_weight[u])
                .sum();
            *slot = base + d * inflow;
        }
        delta = rank.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if delta < params.tol {
            return Ok(rank);
        }
    }
    if delta > CONVERGENCE_FLOOR {
        return Err(Error::NonConvergence {
            iters: params.max_iters,
            delta,
        });
    }
    Ok(rank)
}

/// The `budget` vertices with the highest PageRank, lowest index on ties.
pub fn pagerank_select(
    g: &SimilarityGraph,
    budget: usize,
    params: &PageRankParams,
) -> Result<SelectionResult> {
    let n = g.num_vertices();
    if budget > n {
        return Err(Error::BudgetExceedsPool { budget, n });
    }
    let scores = pagerank_scores(g, params)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.truncate(budget);
    Ok(SelectionResult::flat(Method::Pagerank, budget, None, order))
}
