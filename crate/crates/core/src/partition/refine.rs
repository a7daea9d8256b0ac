//! Boundary refinement for bisections.
//!
//! [`refine_kl_with`] runs linear-time single-vertex-move passes with a
//! best-prefix rewind and never returns a larger cut than it was given.
//! [`rebalance`] is the separate step that restores the weight window after
//! projection when refinement alone cannot; it may trade cut for balance.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{BalanceBounds, Bisection, DEFAULT_EPSILON};
use crate::error::{Error, Result};
use crate::graph::SimilarityGraph;

/// A pass stops after this many consecutive moves without a new best prefix.
const STALL_MOVES: usize = 100;

/// Cut at the start of refinement and after each pass.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RefineTrace {
    pub cuts: Vec<u64>,
}

impl RefineTrace {
    pub fn is_monotone(&self) -> bool {
        self.cuts.windows(2).all(|w| w[1] <= w[0])
    }
}

fn gains(g: &SimilarityGraph, side: &[u8]) -> Vec<i64> {
    (0..g.num_vertices())
        .map(|v| {
            g.adjacency(v)
                .map(|(u, w)| if side[u] == side[v] { -(w as i64) } else { w as i64 })
                .sum()
        })
        .collect()
}

type Entry = (i64, Reverse<usize>);

/// Pops stale entries; an entry is live if its vertex is unlocked, still on
/// this heap's side, and its recorded gain is current.
fn valid_top(
    heap: &mut BinaryHeap<Entry>,
    heap_side: u8,
    side: &[u8],
    gain: &[i64],
    locked: &[bool],
) -> Option<Entry> {
    while let Some(&(gv, Reverse(v))) = heap.peek() {
        if !locked[v] && side[v] == heap_side && gain[v] == gv {
            return Some((gv, Reverse(v)));
        }
        heap.pop();
    }
    None
}

fn move_vertex(
    g: &SimilarityGraph,
    b: &mut Bisection,
    gain: &mut [i64],
    v: usize,
    mut on_update: impl FnMut(usize, i64, u8),
) {
    let from = b.side[v];
    let w = g.vertex_weight(v);
    b.cut = (b.cut as i64 - gain[v]) as u64;
    b.side[v] = 1 - from;
    b.side_weights[from as usize] -= w;
    b.side_weights[1 - from as usize] += w;
    gain[v] = -gain[v];
    for (u, ew) in g.adjacency(v) {
        let delta = 2 * ew as i64;
        if b.side[u] == from {
            gain[u] += delta;
        } else {
            gain[u] -= delta;
        }
        on_update(u, gain[u], b.side[u]);
    }
}

/// A move may reduce the violation, or leave it at most `slack`.
fn allowed(g: &SimilarityGraph, b: &Bisection, bounds: &BalanceBounds, v: usize, slack: u64) -> bool {
    let from = b.side[v] as usize;
    let w = g.vertex_weight(v);
    let mut next = b.side_weights;
    next[from] -= w;
    next[1 - from] += w;
    let after = bounds.violation(next);
    after <= slack || after < bounds.violation(b.side_weights)
}

/// One FM pass. Returns true if the kept prefix improved `(violation, cut)`.
fn fm_pass(g: &SimilarityGraph, b: &mut Bisection, bounds: &BalanceBounds) -> bool {
    let n = g.num_vertices();
    let mut gain = gains(g, &b.side);
    let mut locked = vec![false; n];
    let mut heaps: [BinaryHeap<Entry>; 2] = [BinaryHeap::new(), BinaryHeap::new()];
    for v in 0..n {
        heaps[b.side[v] as usize].push((gain[v], Reverse(v)));
    }

    // Within a pass the split may drift one vertex weight outside the
    // window, so balanced pair exchanges are reachable; kept prefixes never
    // end up less balanced than the start.
    let slack = g.vertex_weights().iter().copied().max().unwrap_or(0);
    let start_cut = b.cut;
    let mut best = (bounds.violation(b.side_weights), b.cut);
    let mut best_len = 0;
    let mut moves: Vec<usize> = Vec::new();
    let mut since_best = 0;

    loop {
        let mut pick: Option<Entry> = None;
        for (s, heap) in heaps.iter_mut().enumerate() {
            if let Some(top) = valid_top(heap, s as u8, &b.side, &gain, &locked) {
                if allowed(g, b, bounds, top.1 .0, slack) && pick.is_none_or(|p| top > p) {
                    pick = Some(top);
                }
            }
        }
        let Some((_, Reverse(v))) = pick else { break };
        heaps[b.side[v] as usize].pop();
        locked[v] = true;
        move_vertex(g, b, &mut gain, v, |u, gu, su| {
            if !locked[u] {
                heaps[su as usize].push((gu, Reverse(u)));
            }
        });
        moves.push(v);
        let state = (bounds.violation(b.side_weights), b.cut);
        if b.cut <= start_cut && state < best {
            best = state;
            best_len = moves.len();
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= STALL_MOVES {
                break;
            }
        }
    }

    for &v in moves[best_len..].iter().rev() {
        move_vertex(g, b, &mut gain, v, |_, _, _| {});
    }
    best_len > 0
}

/// Refinement with an even-split window at the default tolerance.
pub fn refine_kl(g: &SimilarityGraph, b: &Bisection, max_passes: usize) -> Result<Bisection> {
    let bounds = BalanceBounds::halves(g.total_vertex_weight(), DEFAULT_EPSILON);
    refine_kl_with(g, b, &bounds, max_passes).map(|(out, _)| out)
}

/// FM refinement: repeatedly moves the highest-gain unlocked vertex whose
/// move keeps the split within one vertex weight of `bounds` (or brings it
/// closer), then rewinds to the best prefix, preferring balance before cut. Gain ties go to the lower vertex index. Stops after a pass with
/// no improvement or after `max_passes` passes.
pub fn refine_kl_with(
    g: &SimilarityGraph,
    b: &Bisection,
    bounds: &BalanceBounds,
    max_passes: usize,
) -> Result<(Bisection, RefineTrace)> {
    b.validate(g)?;
    let mut out = b.clone();
    let mut trace = RefineTrace {
        cuts: vec![out.cut],
    };
    for _ in 0..max_passes {
        let improved = fm_pass(g, &mut out, bounds);
        trace.cuts.push(out.cut);
        if !improved {
            break;
        }
    }
    if out.cut > b.cut {
        return Err(Error::Invariant(format!(
            "refinement raised the cut from {} to {}",
            b.cut, out.cut
        )));
    }
    Ok((out, trace))
}

/// Moves vertices out of the side that breaks `bounds` until the window is
/// met or no single move reduces the violation. Each move takes the
/// highest-gain eligible vertex, lowest index on ties.
pub fn rebalance(g: &SimilarityGraph, b: &mut Bisection, bounds: &BalanceBounds) {
    if bounds.violation(b.side_weights) == 0 {
        return;
    }
    let n = g.num_vertices();
    let mut gain = gains(g, &b.side);
    let locked = vec![false; n];
    let mut heaps: [BinaryHeap<Entry>; 2] = [BinaryHeap::new(), BinaryHeap::new()];
    for v in 0..n {
        heaps[b.side[v] as usize].push((gain[v], Reverse(v)));
    }
    let mut deferred: Vec<Entry> = Vec::new();
    while bounds.violation(b.side_weights) > 0 {
        let w = b.side_weights;
        let from = if w[0] > bounds.max[0] || w[1] < bounds.min[1] { 0 } else { 1 };
        let heap = &mut heaps[from];
        let mut chosen = None;
        deferred.clear();
        while let Some(top) = valid_top(heap, from as u8, &b.side, &gain, &locked) {
            heap.pop();
            if allowed(g, b, bounds, top.1 .0, 0) {
                chosen = Some(top.1 .0);
                break;
            }
            deferred.push(top);
        }
        heap.extend(deferred.drain(..));
        let Some(v) = chosen else { break };
        move_vertex(g, b, &mut gain, v, |u, gu, su| heaps[su as usize].push((gu, Reverse(u))));
        heaps[b.side[v] as usize].push((gain[v], Reverse(v)));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::rng;
    use rand::Rng;

    fn bis(g: &SimilarityGraph, sides: &[u8]) -> Bisection {
        Bisection::from_sides(g, sides.to_vec()).unwrap()
    }

    #[test]
    fn optimal_bisection_is_unchanged() {
        let g = bridged_triangles();
        let b = bis(&g, &[0, 0, 0, 1, 1, 1]);
        let out = refine_kl(&g, &b, 10).unwrap();
        assert_eq!(out, b);
        assert_eq!(out.cut, 1);
    }

    #[test]
    fn four_cycle_alternating_becomes_adjacent_pairs() {
        let g = cycle(4);
        let b = bis(&g, &[0, 1, 0, 1]);
        assert_eq!(b.cut, 4);
        let out = refine_kl(&g, &b, 10).unwrap();
        assert_eq!(out.cut, 2);
        assert_eq!(out.side_weights, [2, 2]);
        out.validate(&g).unwrap();
    }

    #[test]
    fn rejects_inconsistent_input() {
        let g = cycle(4);
        let mut b = bis(&g, &[0, 0, 1, 1]);
        b.cut = 7;
        assert!(matches!(refine_kl(&g, &b, 3), Err(Error::InvalidBisection(_))));
    }

    #[test]
    fn rebalance_restores_window() {
        let g = path(10);
        let mut b = bis(&g, &[0, 0, 0, 0, 0, 0, 0, 0, 1, 1]);
        let bounds = BalanceBounds::halves(10, 0.03);
        rebalance(&g, &mut b, &bounds);
        assert_eq!(bounds.violation(b.side_weights), 0);
        b.validate(&g).unwrap();
        assert_eq!(b.cut, 1);
    }

    #[test]
    fn random_inputs_never_get_worse() {
        let mut r = rng::stream(42, &[]);
        for _ in 0..200 {
            let n = r.gen_range(2..40);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if r.gen_bool(0.2) {
                        edges.push((u, v, r.gen_range(1..5)));
                    }
                }
            }
            let g = SimilarityGraph::from_edges(n, &edges, None).unwrap();
            let half = n / 2;
            let mut sides: Vec<u8> = (0..n).map(|i| u8::from(i >= half)).collect();
            for i in (1..n).rev() {
                sides.swap(i, r.gen_range(0..=i));
            }
            let b = bis(&g, &sides);
            let bounds = BalanceBounds::halves(n as u64, 0.03);
            let (out, trace) = refine_kl_with(&g, &b, &bounds, 10).unwrap();
            out.validate(&g).unwrap();
            assert!(out.cut <= b.cut);
            assert!(trace.is_monotone());
            assert_eq!(bounds.violation(out.side_weights), 0);
        }
    }
}
