use std::collections::VecDeque;

use rand::Rng;

use super::{BalanceBounds, Bisection, DEFAULT_EPSILON};
use crate::error::{Error, Result};
use crate::graph::SimilarityGraph;

/// Best of `trials` BFS region growths toward an even split.
pub fn bfs_initial_bisect<R: Rng + ?Sized>(
    g: &SimilarityGraph,
    trials: usize,
    rng: &mut R,
) -> Result<Bisection> {
    let bounds = BalanceBounds::halves(g.total_vertex_weight(), DEFAULT_EPSILON);
    bfs_initial_bisect_with(g, trials, &bounds, rng)
}

/// Grows a BFS region (side 0) from each of `trials` distinct random start
/// vertices until its weight reaches `bounds.target[0]`, and keeps the trial
/// with the fewest balance violations, then the smallest cut; earlier trials
/// win ties.
///
/// Vertices that would push the region past `bounds.max[0]` are skipped.
/// When the frontier empties early, growth restarts at the lowest-index
/// vertex not yet reached.
pub fn bfs_initial_bisect_with<R: Rng + ?Sized>(
    g: &SimilarityGraph,
    trials: usize,
    bounds: &BalanceBounds,
    rng: &mut R,
) -> Result<Bisection> {
    let n = g.num_vertices();
    if n < 2 {
        return Err(Error::GraphTooSmall { n });
    }
    let trials = trials.clamp(1, n);
    let starts = rand::seq::index::sample(rng, n, trials);

    let mut best: Option<(u64, Bisection)> = None;
    let mut queued = vec![false; n];
    let mut queue = VecDeque::new();
    for start in starts.iter() {
        queued.iter_mut().for_each(|q| *q = false);
        queue.clear();
        let mut side = vec![1u8; n];
        let mut region = 0u64;
        let mut next_unreached = 0;
        queued[start] = true;
        queue.push_back(start);
        while (region as f64) < bounds.target[0] {
            let v = match queue.pop_front() {
                Some(v) => v,
                None => {
                    while next_unreached < n && queued[next_unreached] {
                        next_unreached += 1;
                    }
                    if next_unreached == n {
                        break;
                    }
                    queued[next_unreached] = true;
                    next_unreached
                }
            };
            if region + g.vertex_weight(v) > bounds.max[0] {
                continue;
            }
            side[v] = 0;
            region += g.vertex_weight(v);
            for &u in g.neighbors(v) {
                if !queued[u] {
                    queued[u] = true;
                    queue.push_back(u);
                }
            }
        }
        let b = Bisection::compute(g, side);
        let violation = bounds.violation(b.side_weights);
        let better = match &best {
            None => true,
            Some((bv, bb)) => (violation, b.cut) < (*bv, bb.cut),
        };
        if better {
            best = Some((violation, b));
        }
    }
    Ok(best.expect("at least one trial").1)
}
