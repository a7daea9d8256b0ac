//! Balanced K-way partitioning by recursive multilevel bisection.
//!
//! Each bisection coarsens the graph by random matching, grows BFS regions
//! from several random seeds on the coarsest graph, then projects the best
//! region back level by level with FM-style refinement at every level.

mod coarsen;
mod initial;
mod kway;
mod multilevel;
mod refine;

use serde::{Deserialize, Serialize};

pub use coarsen::{random_matching_coarsen, CoarseningLevel};
pub use initial::{bfs_initial_bisect, bfs_initial_bisect_with};
pub use kway::{part_capacity, partition_kway, partition_kway_with, KwayOutcome};
pub use multilevel::{multilevel_bisect, multilevel_bisect_with, BisectionReport, LevelTrace};
pub use refine::{rebalance, refine_kl, refine_kl_with, RefineTrace};

use crate::error::{Error, Result};
use crate::graph::SimilarityGraph;
use crate::timing::Timings;

pub const DEFAULT_EPSILON: f64 = 0.03;
pub const DEFAULT_TRIALS: usize = 10;
pub const DEFAULT_MAX_PASSES: usize = 10;
pub const DEFAULT_COARSEN_TO: usize = 100;
/// Coarsening stops once a pass keeps more than this fraction of vertices.
pub const DEFAULT_STALL_RATIO: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionOptions {
    pub epsilon: f64,
    pub trials: usize,
    pub max_passes: usize,
    pub coarsen_to: usize,
    pub stall_ratio: f64,
}

impl Default for PartitionOptions {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            trials: DEFAULT_TRIALS,
            max_passes: DEFAULT_MAX_PASSES,
            coarsen_to: DEFAULT_COARSEN_TO,
            stall_ratio: DEFAULT_STALL_RATIO,
        }
    }
}

impl PartitionOptions {
    pub fn with_epsilon(epsilon: f64) -> Self {
        Self {
            epsilon,
            ..Self::default()
        }
    }
}

/// Per-side weight window for a bisection.
///
/// `target` is the ideal weight of each side; a bisection is balanced when
/// `min[s] <= weight[s] <= max[s]` on both sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalanceBounds {
    pub target: [f64; 2],
    pub min: [u64; 2],
    pub max: [u64; 2],
}

impl BalanceBounds {
    /// An even split with relative tolerance `epsilon`.
    pub fn halves(total: u64, epsilon: f64) -> Self {
        Self::proportional(total, 1, 1, epsilon, None)
    }

    /// Split of `total` destined for `left_parts + right_parts` final parts.
    ///
    /// Side `s` targets `total * parts[s] / (left + right)`, may exceed it by
    /// `epsilon` (at least up to the next integer), must hold at least
    /// `parts[s]` weight, and never more than `parts[s] * part_cap`.
    pub fn proportional(
        total: u64,
        left_parts: usize,
        right_parts: usize,
        epsilon: f64,
        part_cap: Option<u64>,
    ) -> Self {
        let parts = [left_parts as u64, right_parts as u64];
        let sum = (left_parts + right_parts) as f64;
        let mut target = [0.0; 2];
        let mut min = [0; 2];
        let mut max = [0; 2];
        for s in 0..2 {
            let t = total as f64 * parts[s] as f64 / sum;
            let loose = (t * (1.0 + epsilon) + 1e-9).floor() as u64;
            let mut hi = loose.max(t.ceil() as u64);
            if let Some(cap) = part_cap {
                hi = hi.min(parts[s] * cap);
            }
            target[s] = t;
            min[s] = parts[s];
            max[s] = hi;
        }
        Self { target, min, max }
    }

    /// Total weight outside the window, summed over both sides.
    pub fn violation(&self, weights: [u64; 2]) -> u64 {
        (0..2)
            .map(|s| {
                weights[s].saturating_sub(self.max[s]) + self.min[s].saturating_sub(weights[s])
            })
            .sum()
    }
}

/// A 2-way split: `side[v]` is 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bisection {
    pub side: Vec<u8>,
    pub cut: u64,
    pub side_weights: [u64; 2],
}

impl Bisection {
    pub fn from_sides(g: &SimilarityGraph, side: Vec<u8>) -> Result<Self> {
        if side.len() != g.num_vertices() {
            return Err(Error::InvalidBisection(format!(
                "{} sides for {} vertices",
                side.len(),
                g.num_vertices()
            )));
        }
        if side.iter().any(|&s| s > 1) {
            return Err(Error::InvalidBisection("side flags must be 0 or 1".into()));
        }
        Ok(Self::compute(g, side))
    }

    pub(crate) fn compute(g: &SimilarityGraph, side: Vec<u8>) -> Self {
        let mut side_weights = [0u64; 2];
        for (v, &s) in side.iter().enumerate() {
            side_weights[s as usize] += g.vertex_weight(v);
        }
        let cut = g
            .edges()
            .filter(|&(u, v, _)| side[u] != side[v])
            .map(|(_, _, w)| w)
            .sum();
        Self {
            side,
            cut,
            side_weights,
        }
    }

    /// Checks the cached cut and weights against a recomputation.
    pub fn validate(&self, g: &SimilarityGraph) -> Result<()> {
        let fresh = Self::from_sides(g, self.side.clone())?;
        if fresh.cut != self.cut || fresh.side_weights != self.side_weights {
            return Err(Error::InvalidBisection(format!(
                "cached cut/weights {}/{:?} differ from recomputed {}/{:?}",
                self.cut, self.side_weights, fresh.cut, fresh.side_weights
            )));
        }
        Ok(())
    }
}

/// Assignment of every vertex to one of `k` parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<usize>,
    k: usize,
    part_sizes: Vec<usize>,
}

impl Partition {
    pub fn from_assignment(assignment: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParts {
                parts: 0,
                n: assignment.len(),
            });
        }
        let mut part_sizes = vec![0; k];
        for (v, &p) in assignment.iter().enumerate() {
            if p >= k {
                return Err(Error::InvalidParameter(format!(
                    "vertex {v} assigned to part {p} of {k}"
                )));
            }
            part_sizes[p] += 1;
        }
        Ok(Self {
            assignment,
            k,
            part_sizes,
        })
    }

    pub fn trivial(n: usize) -> Self {
        Self {
            assignment: vec![0; n],
            k: 1,
            part_sizes: vec![n],
        }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn part_sizes(&self) -> &[usize] {
        &self.part_sizes
    }

    pub fn part_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    /// Vertices of every part, each list ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.part_sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
        for (v, &p) in self.assignment.iter().enumerate() {
            out[p].push(v);
        }
        out
    }

    /// No empty part, and no part above `ceil(n / k) * (1 + epsilon)`.
    pub fn check_balance(&self, epsilon: f64) -> Result<()> {
        let cap = part_capacity(self.assignment.len(), self.k, epsilon);
        for (p, &s) in self.part_sizes.iter().enumerate() {
            if s == 0 || s as u64 > cap {
                return Err(Error::Invariant(format!(
                    "part {p} has {s} vertices (allowed 1..={cap})"
                )));
            }
        }
        Ok(())
    }
}

/// Partition output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionFile {
    #[serde(rename = "K")]
    pub k: usize,
    pub seed: u64,
    pub assignment: Vec<usize>,
    pub cut: u64,
    pub part_sizes: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings_ms: Option<Timings>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halves_window() {
        let b = BalanceBounds::halves(1000, 0.03);
        assert_eq!(b.max, [515, 515]);
        assert_eq!(b.min, [1, 1]);
        assert_eq!(b.violation([500, 500]), 0);
        assert_eq!(b.violation([520, 480]), 5);
        let odd = BalanceBounds::halves(5, 0.03);
        assert_eq!(odd.max, [3, 3]);
    }

    #[test]
    fn proportional_window_respects_cap() {
        // 600 vertices into 3 parts with cap 103 per part.
        let b = BalanceBounds::proportional(600, 2, 1, 0.03, Some(103));
        assert_eq!(b.max, [206, 103]);
        assert_eq!(b.min, [2, 1]);
        assert!((b.target[0] - 400.0).abs() < 1e-9);
    }

    #[test]
    fn partition_balance_check() {
        let p = Partition::from_assignment(vec![0, 0, 1, 1, 2, 2], 3).unwrap();
        assert_eq!(p.part_sizes(), [2, 2, 2]);
        p.check_balance(0.03).unwrap();
        let lopsided = Partition::from_assignment(vec![0, 0, 0, 1, 1, 1], 3).unwrap();
        assert!(lopsided.check_balance(0.03).is_err());
        assert!(Partition::from_assignment(vec![0, 3], 3).is_err());
        assert_eq!(p.members(), vec![vec![0, 1], vec![2, 3], vec![4, 5]]);
    }
}
