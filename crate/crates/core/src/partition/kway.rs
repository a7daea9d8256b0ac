use std::time::Instant;

use super::{multilevel_bisect_with, BalanceBounds, BisectionReport, Partition, PartitionOptions};
use crate::error::{Error, Result};
use crate::graph::{cut_of_assignment, SimilarityGraph};
use crate::rng;
use crate::timing::{elapsed_ms, Timings};

/// Largest admissible part: `floor(ceil(n / k) * (1 + epsilon))`.
pub fn part_capacity(n: usize, k: usize, epsilon: f64) -> u64 {
    let ideal = n.div_ceil(k.max(1)) as f64;
    ((ideal * (1.0 + epsilon)) + 1e-9).floor() as u64
}

#[derive(Debug, Clone)]
pub struct KwayOutcome {
    pub partition: Partition,
    pub cut: u64,
    /// Stage totals over all bisections: `coarsen`, `init_bisect`, `refine`,
    /// `partition_total`.
    pub timings: Timings,
    /// One report per bisection, keyed by recursion node (root = 1, children
    /// of node `i` are `2i` and `2i + 1`), sorted by node.
    pub reports: Vec<(u64, BisectionReport)>,
}

/// K-way partition with default options.
pub fn partition_kway(g: &SimilarityGraph, k: usize, seed: u64) -> Result<Partition> {
    partition_kway_with(g, k, seed, &PartitionOptions::default()).map(|o| o.partition)
}

/// Recursive bisection into `k` parts.
///
/// A node owning `p` parts sends `ceil(p / 2)` to side 0 and `floor(p / 2)`
/// to side 1, with side targets proportional to those counts. Every side is
/// also capped at `parts * part_capacity(n, k, epsilon)`, which keeps the
/// leaves inside the global balance bound. Branches run in parallel and
/// draw from streams derived from `(seed, node)`.
pub fn partition_kway_with(
    g: &SimilarityGraph,
    k: usize,
    seed: u64,
    opts: &PartitionOptions,
) -> Result<KwayOutcome> {
    let n = g.num_vertices();
    if k == 0 || k > n {
        return Err(Error::InvalidParts { parts: k, n });
    }
    let start = Instant::now();
    let cap = part_capacity(n, k, opts.epsilon);
    let ctx = Ctx { seed, cap, opts };
    let all: Vec<usize> = (0..n).collect();
    let mut assignment = vec![usize::MAX; n];
    let mut reports = Vec::new();
    if k == 1 {
        assignment.fill(0);
    } else {
        let leaves = ctx.recurse(g, &all, k, 0, 1, &mut reports)?;
        for (v, p) in leaves {
            assignment[v] = p;
        }
    }
    reports.sort_by_key(|r| r.0);
    let mut timings = Timings::new();
    for stage in ["coarsen", "init_bisect", "refine"] {
        timings.set(stage, 0.0);
    }
    for (_, r) in &reports {
        timings.merge(&r.timings);
    }
    let partition = Partition::from_assignment(assignment, k)?;
    partition.check_balance(opts.epsilon)?;
    let cut = cut_of_assignment(g, partition.assignment());
    timings.set("partition_total", elapsed_ms(start));
    Ok(KwayOutcome {
        partition,
        cut,
        timings,
        reports,
    })
}

struct Ctx<'a> {
    seed: u64,
    cap: u64,
    opts: &'a PartitionOptions,
}

impl Ctx<'_> {
    /// Returns `(original vertex, part)` for every vertex of `sub`.
    fn recurse(
        &self,
        sub: &SimilarityGraph,
        to_orig: &[usize],
        parts: usize,
        first_part: usize,
        node: u64,
        reports: &mut Vec<(u64, BisectionReport)>,
    ) -> Result<Vec<(usize, usize)>> {
        if parts == 1 {
            return Ok(to_orig.iter().map(|&v| (v, first_part)).collect());
        }
        let left_parts = parts.div_ceil(2);
        let right_parts = parts / 2;
        let bounds = BalanceBounds::proportional(
            sub.total_vertex_weight(),
            left_parts,
            right_parts,
            self.opts.epsilon,
            Some(self.cap),
        );
        let mut r = rng::stream(self.seed, &[node]);
        let (b, report) = multilevel_bisect_with(sub, &bounds, self.opts, &mut r)?;
        if bounds.violation(b.side_weights) != 0 {
            return Err(Error::Invariant(format!(
                "bisection at node {node} has side weights {:?} outside [{:?}, {:?}]",
                b.side_weights, bounds.min, bounds.max
            )));
        }
        reports.push((node, report));

        let split = |s: u8| -> Result<(SimilarityGraph, Vec<usize>)> {
            let local: Vec<usize> = (0..sub.num_vertices()).filter(|&v| b.side[v] == s).collect();
            let (g, _) = sub.induced_subgraph(&local)?;
            Ok((g, local.iter().map(|&v| to_orig[v]).collect()))
        };
        let (lg, lmap) = split(0)?;
        let (rg, rmap) = split(1)?;

        let mut left_reports = Vec::new();
        let mut right_reports = Vec::new();
        let (left, right) = rayon::join(
            || self.recurse(&lg, &lmap, left_parts, first_part, 2 * node, &mut left_reports),
            || {
                self.recurse(
                    &rg,
                    &rmap,
                    right_parts,
                    first_part + left_parts,
                    2 * node + 1,
                    &mut right_reports,
                )
            },
        );
        reports.append(&mut left_reports);
        reports.append(&mut right_reports);
        let mut out = left?;
        out.extend(right?);
        Ok(out)
    }
}
