use std::time::Instant;

use rand::Rng;

use super::{
    bfs_initial_bisect_with, random_matching_coarsen, rebalance, refine_kl_with, BalanceBounds,
    Bisection, CoarseningLevel, PartitionOptions, RefineTrace,
};
use crate::error::{Error, Result};
use crate::graph::SimilarityGraph;
use crate::timing::{elapsed_ms, Timings};

/// What happened at one level of the uncoarsening sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelTrace {
    pub level: usize,
    pub num_vertices: usize,
    pub total_vertex_weight: u64,
    pub total_edge_weight: u64,
    /// Cut of the coarser bisection being projected (None at the coarsest level).
    pub coarse_cut: Option<u64>,
    /// Cut recomputed from scratch right after projection.
    pub projected_cut: u64,
    /// Cut after rebalancing, i.e. the input to refinement.
    pub cut_before_refine: u64,
    pub refine: RefineTrace,
}

#[derive(Debug, Clone, Default)]
pub struct BisectionReport {
    /// Coarsest level first.
    pub levels: Vec<LevelTrace>,
    pub timings: Timings,
}

impl BisectionReport {
    pub fn coarsening_depth(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }
}

/// Even multilevel bisection with default options.
pub fn multilevel_bisect<R: Rng + ?Sized>(g: &SimilarityGraph, rng: &mut R) -> Result<Bisection> {
    let opts = PartitionOptions::default();
    let bounds = BalanceBounds::halves(g.total_vertex_weight(), opts.epsilon);
    multilevel_bisect_with(g, &bounds, &opts, rng).map(|(b, _)| b)
}

/// Coarsen, bisect the coarsest graph, then project and refine level by level.
///
/// Coarsening stops when the graph has at most `opts.coarsen_to` vertices or
/// a pass keeps more than `opts.stall_ratio` of them (that last level is
/// dropped). Timings are recorded under `coarsen`, `init_bisect` and `refine`.
pub fn multilevel_bisect_with<R: Rng + ?Sized>(
    g: &SimilarityGraph,
    bounds: &BalanceBounds,
    opts: &PartitionOptions,
    rng: &mut R,
) -> Result<(Bisection, BisectionReport)> {
    let n = g.num_vertices();
    if n < 2 {
        return Err(Error::GraphTooSmall { n });
    }
    let mut report = BisectionReport::default();

    let start = Instant::now();
    let mut hierarchy: Vec<CoarseningLevel> = Vec::new();
    loop {
        let current = hierarchy.last().map_or(g, |l| &l.graph);
        if current.num_vertices() <= opts.coarsen_to {
            break;
        }
        let next = random_matching_coarsen(current, rng)?;
        if next.graph.num_vertices() as f64 > opts.stall_ratio * current.num_vertices() as f64 {
            break;
        }
        hierarchy.push(next);
    }
    report.timings.add("coarsen", elapsed_ms(start));

    let graph_at = |i: usize| if i == 0 { g } else { &hierarchy[i - 1].graph };
    let depth = hierarchy.len();

    let start = Instant::now();
    let coarsest = graph_at(depth);
    let mut current = if coarsest.num_vertices() >= 2 {
        bfs_initial_bisect_with(coarsest, opts.trials, bounds, rng)?
    } else {
        // Everything collapsed into one vertex; put it on the heavier target side.
        let side = u8::from(bounds.target[1] > bounds.target[0]);
        Bisection::compute(coarsest, vec![side])
    };
    report.timings.add("init_bisect", elapsed_ms(start));

    let start = Instant::now();
    let mut coarse_cut = None;
    for level in (0..=depth).rev() {
        let lg = graph_at(level);
        if level < depth {
            let map = &hierarchy[level].match_map;
            let side = map.iter().map(|&c| current.side[c]).collect();
            coarse_cut = Some(current.cut);
            current = Bisection::compute(lg, side);
        }
        let projected_cut = current.cut;
        rebalance(lg, &mut current, bounds);
        let cut_before_refine = current.cut;
        let (refined, trace) = refine_kl_with(lg, &current, bounds, opts.max_passes)?;
        current = refined;
        report.levels.push(LevelTrace {
            level,
            num_vertices: lg.num_vertices(),
            total_vertex_weight: lg.total_vertex_weight(),
            total_edge_weight: lg.total_edge_weight(),
            coarse_cut,
            projected_cut,
            cut_before_refine,
            refine: trace,
        });
    }
    report.timings.add("refine", elapsed_ms(start));
    Ok((current, report))
}
