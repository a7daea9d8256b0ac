use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;

use super::{allocate_quotas, greedy_select, Method, SelectionResult};
use crate::error::{Error, Result};
use crate::graph::SimilarityGraph;
use crate::partition::{partition_kway_with, PartitionOptions};
use crate::timing::elapsed_ms;

/// Partition into `parts` balanced parts, then greedy residual-degree picks
/// inside each part's induced subgraph.
pub fn fastgas_select(
    g: &SimilarityGraph,
    parts: usize,
    budget: usize,
    seed: u64,
) -> Result<SelectionResult> {
    fastgas_select_with(g, parts, budget, seed, &PartitionOptions::default())
}

/// Stage timings: the partition stages plus `induce` (building the part
/// subgraphs), `select` (greedy picks only) and `total`.
pub fn fastgas_select_with(
    g: &SimilarityGraph,
    parts: usize,
    budget: usize,
    seed: u64,
    opts: &PartitionOptions,
) -> Result<SelectionResult> {
    let n = g.num_vertices();
    if parts == 0 || parts > n {
        return Err(Error::InvalidParts { parts, n });
    }
    if budget == 0 || budget > n {
        return Err(Error::BudgetExceedsPool { budget, n });
    }
    let start = Instant::now();
    let outcome = partition_kway_with(g, parts, seed, opts)?;
    let mut timings = outcome.timings.clone();

    let members = outcome.partition.members();
    let quotas = allocate_quotas(outcome.partition.part_sizes(), budget)?;

    let t = Instant::now();
    let subgraphs = members
        .par_iter()
        .map(|m| g.induced_subgraph(m).map(|(sub, _)| sub))
        .collect::<Result<Vec<_>>>()?;
    timings.set("induce", elapsed_ms(t));

    let t = Instant::now();
    let picks = subgraphs
        .par_iter()
        .zip(&quotas)
        .map(|(sub, &q)| greedy_select(sub, q))
        .collect::<Result<Vec<_>>>()?;
    timings.set("select", elapsed_ms(t));

    let mut selected = Vec::with_capacity(budget);
    let mut per_part = BTreeMap::new();
    for (p, local) in picks.into_iter().enumerate() {
        let global: Vec<usize> = local.into_iter().map(|v| members[p][v]).collect();
        selected.extend_from_slice(&global);
        per_part.insert(p, global);
    }
    timings.set("total", elapsed_ms(start));
    Ok(SelectionResult {
        method: Method::Fastgas,
        budget,
        parts: Some(parts),
        seed: Some(seed),
        selected,
        per_part,
        timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::generate_synthetic;
    use crate::graph::build_knn_graph;
    use std::collections::HashSet;

    fn pool_graph(n: usize) -> SimilarityGraph {
        let m = generate_synthetic(n, 16, 6, 0.3, 5).unwrap();
        build_knn_graph(&m, 10).unwrap()
    }

    #[test]
    fn single_part_equals_plain_greedy() {
        let g = pool_graph(200);
        let r = fastgas_select(&g, 1, 15, 9).unwrap();
        assert_eq!(r.selected, greedy_select(&g, 15).unwrap());
        assert_eq!(r.per_part.len(), 1);
    }

    #[test]
    fn quotas_follow_partition_sizes() {
        let g = pool_graph(600);
        let r = fastgas_select(&g, 6, 18, 0).unwrap();
        assert!(r.per_part.values().all(|p| p.len() == 3));
        let r = fastgas_select(&g, 3, 10, 0).unwrap();
        let mut sizes: Vec<usize> = r.per_part.values().map(Vec::len).collect();
        sizes.sort();
        assert_eq!(sizes, vec![3, 3, 4]);
    }

    #[test]
    fn picks_are_distinct_and_grouped() {
        let g = pool_graph(300);
        let r = fastgas_select(&g, 5, 37, 2).unwrap();
        assert_eq!(r.selected.len(), 37);
        let uniq: HashSet<_> = r.selected.iter().collect();
        assert_eq!(uniq.len(), 37);
        let union: Vec<usize> = r.per_part.values().flatten().copied().collect();
        assert_eq!(union, r.selected);
        for key in ["coarsen", "init_bisect", "refine", "partition_total", "induce", "select", "total"] {
            assert!(r.timings.0.contains_key(key), "{key}");
        }
    }

    #[test]
    fn parameter_errors() {
        let g = pool_graph(50);
        assert!(matches!(fastgas_select(&g, 0, 5, 0), Err(Error::InvalidParts { .. })));
        assert!(matches!(fastgas_select(&g, 51, 5, 0), Err(Error::InvalidParts { .. })));
        assert!(matches!(fastgas_select(&g, 2, 51, 0), Err(Error::BudgetExceedsPool { .. })));
        assert!(matches!(fastgas_select(&g, 2, 0, 0), Err(Error::BudgetExceedsPool { .. })));
    }
}
