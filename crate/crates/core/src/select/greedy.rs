use crate::error::{Error, Result};
use crate::graph::SimilarityGraph;

/// Exhaustive coverage search refuses graphs larger than this.
pub const MAX_BRUTE_FORCE_VERTICES: usize = 24;

/// Picks `n` vertices, each time the one of maximum residual degree (lowest
/// index on ties), deleting it and its edges before the next pick.
pub fn greedy_select(g: &SimilarityGraph, n: usize) -> Result<Vec<usize>> {
    greedy_select_traced(g, n).map(|picks| picks.into_iter().map(|(v, _)| v).collect())
}

/// Like [`greedy_select`], also returning each pick's residual degree at pick time.
///
/// Each pick scans the surviving vertices, so `n` picks on `V` vertices cost
/// `O(n V)` plus the degree updates.
pub fn greedy_select_traced(g: &SimilarityGraph, n: usize) -> Result<Vec<(usize, usize)>> {
    let size = g.num_vertices();
    if n > size {
        return Err(Error::BudgetExceedsVertices { budget: n, n: size });
    }
    let mut residual: Vec<usize> = (0..size).map(|v| g.degree_of(v)).collect();
    let mut alive = vec![true; size];
    let mut picks = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best = usize::MAX;
        let mut best_deg = 0;
        for v in 0..size {
            if alive[v] && (best == usize::MAX || residual[v] > best_deg) {
                best = v;
                best_deg = residual[v];
            }
        }
        alive[best] = false;
        for &u in g.neighbors(best) {
            if alive[u] {
                residual[u] -= 1;
            }
        }
        picks.push((best, best_deg));
    }
    Ok(picks)
}

/// Number of edges with at least one endpoint in `set`.
pub fn coverage_objective(g: &SimilarityGraph, set: &[usize]) -> Result<usize> {
    let n = g.num_vertices();
    let mut inside = vec![false; n];
    for &v in set {
        if v >= n {
            return Err(Error::IndexOutOfRange { index: v, len: n });
        }
        inside[v] = true;
    }
    Ok(g.edges().filter(|&(u, v, _)| inside[u] || inside[v]).count())
}

/// Exact maximum of [`coverage_objective`] over all `n`-subsets.
///
/// Returns the lexicographically smallest maximizing set and its value.
pub fn brute_force_max_coverage(g: &SimilarityGraph, n: usize) -> Result<(Vec<usize>, usize)> {
    let size = g.num_vertices();
    if size > MAX_BRUTE_FORCE_VERTICES {
        return Err(Error::GraphTooLarge {
            n: size,
            max: MAX_BRUTE_FORCE_VERTICES,
        });
    }
    if n > size {
        return Err(Error::BudgetExceedsVertices { budget: n, n: size });
    }
    let nbr: Vec<u32> = (0..size)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | (1 << u)))
        .collect();
    let total = g.num_edges();
    // Covered = total minus edges with both endpoints outside the set.
    let covered = |mask: u32| -> usize {
        let outside = !mask & ((1u64 << size) - 1) as u32;
        let uncovered2: u32 = (0..size)
            .filter(|&v| outside & (1 << v) != 0)
            .map(|v| (nbr[v] & outside).count_ones())
            .sum();
        total - uncovered2 as usize / 2
    };

    let mut combo: Vec<usize> = (0..n).collect();
    let mut best = (combo.clone(), covered(combo.iter().fold(0, |m, &v| m | (1 << v))));
    // Advance through the combinations in lexicographic order.
    while let Some(i) = (0..n).rev().find(|&i| combo[i] < size - n + i) {
        combo[i] += 1;
        for j in i + 1..n {
            combo[j] = combo[j - 1] + 1;
        }
        let value = covered(combo.iter().fold(0, |m, &v| m | (1 << v)));
        if value > best.1 {
            best = (combo.clone(), value);
        }
    }
    Ok(best)
}
