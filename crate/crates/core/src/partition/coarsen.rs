use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::SimilarityGraph;

/// One coarsening step: the contracted graph and, for every fine vertex,
/// the coarse vertex it was merged into.
#[derive(Debug, Clone)]
pub struct CoarseningLevel {
    pub graph: SimilarityGraph,
    pub match_map: Vec<usize>,
}

impl CoarseningLevel {
    /// Fine vertices merged into each coarse vertex (one or two each).
    pub fn preimages(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::with_capacity(2); self.graph.num_vertices()];
        for (v, &c) in self.match_map.iter().enumerate() {
            out[c].push(v);
        }
        out
    }
}

/// Contracts a random maximal matching.
///
/// Vertices are visited in shuffled order; each unmatched vertex is paired
/// with a uniformly chosen unmatched neighbor, or stays a singleton if none
/// is left. Coarse vertex ids follow the lowest fine index of each group.
pub fn random_matching_coarsen<R: Rng + ?Sized>(
    g: &SimilarityGraph,
    rng: &mut R,
) -> Result<CoarseningLevel> {
    let n = g.num_vertices();
    if n < 2 {
        return Err(Error::GraphTooSmall { n });
    }
    const UNMATCHED: usize = usize::MAX;
    let mut partner = vec![UNMATCHED; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut free = Vec::new();
    for &u in &order {
        if partner[u] != UNMATCHED {
            continue;
        }
        free.clear();
        free.extend(g.neighbors(u).iter().copied().filter(|&v| partner[v] == UNMATCHED));
        if free.is_empty() {
            partner[u] = u;
        } else {
            let v = free[rng.gen_range(0..free.len())];
            partner[u] = v;
            partner[v] = u;
        }
    }

    let mut match_map = vec![UNMATCHED; n];
    let mut groups: Vec<[usize; 2]> = Vec::with_capacity(n / 2 + 1);
    for v in 0..n {
        if match_map[v] == UNMATCHED {
            let c = groups.len();
            match_map[v] = c;
            match_map[partner[v]] = c;
            groups.push([v, partner[v]]);
        }
    }

    let cn = groups.len();
    let mut xadj = Vec::with_capacity(cn + 1);
    xadj.push(0);
    let mut adjncy = Vec::with_capacity(g.num_edges() * 2);
    let mut adjwgt = Vec::with_capacity(g.num_edges() * 2);
    let mut vwgt = Vec::with_capacity(cn);
    let mut slot = vec![UNMATCHED; cn];
    let mut row: Vec<(usize, u64)> = Vec::new();
    for (c, &[a, b]) in groups.iter().enumerate() {
        row.clear();
        let members: &[usize] = if a == b { &[a] } else { &[a, b] };
        let mut weight = 0;
        for &v in members {
            weight += g.vertex_weight(v);
            for (u, w) in g.adjacency(v) {
                let cu = match_map[u];
                if cu == c {
                    continue;
                }
                if slot[cu] == UNMATCHED {
                    slot[cu] = row.len();
                    row.push((cu, w));
                } else {
                    row[slot[cu]].1 += w;
                }
            }
        }
        for &(cu, _) in &row {
            slot[cu] = UNMATCHED;
        }
        adjncy.extend(row.iter().map(|r| r.0));
        adjwgt.extend(row.iter().map(|r| r.1));
        xadj.push(adjncy.len());
        vwgt.push(weight);
    }

    // The rows are symmetric, so scattering them by target lists each row's
    // neighbors in increasing order without a per-row sort.
    let mut next = xadj[..cn].to_vec();
    let mut sorted_adj = vec![0; adjncy.len()];
    let mut sorted_wgt = vec![0; adjwgt.len()];
    for c in 0..cn {
        for i in xadj[c]..xadj[c + 1] {
            let t = adjncy[i];
            sorted_adj[next[t]] = c;
            sorted_wgt[next[t]] = adjwgt[i];
            next[t] += 1;
        }
    }

    Ok(CoarseningLevel {
        graph: SimilarityGraph::from_csr(xadj, sorted_adj, sorted_wgt, vwgt, g.level() + 1),
        match_map,
    })
}
