//! The undirected kNN similarity graph and its structural queries.
//!
//! Storage is CSR: `xadj[v]..xadj[v + 1]` indexes `adjncy`/`adjwgt`, with
//! each neighbor list sorted ascending. The same type carries the weighted
//! coarse graphs produced during partitioning.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::partition::Partition;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimilarityGraph {
    xadj: Vec<usize>,
    adjncy: Vec<usize>,
    adjwgt: Vec<u64>,
    vwgt: Vec<u64>,
    level: usize,
}

impl SimilarityGraph {
    /// Builds a graph from undirected edges `(u, v, w)`; each edge is listed once.
    ///
    /// Rejects self-loops, duplicate edges, zero weights and out-of-range endpoints.
    pub fn from_edges(
        num_vertices: usize,
        edges: &[(usize, usize, u64)],
        vertex_weights: Option<Vec<u64>>,
    ) -> Result<Self> {
        let vwgt = vertex_weights.unwrap_or_else(|| vec![1; num_vertices]);
        if vwgt.len() != num_vertices {
            return Err(Error::InvalidParameter(format!(
                "{} vertex weights for {num_vertices} vertices",
                vwgt.len()
            )));
        }
        if let Some(i) = vwgt.iter().position(|&w| w == 0) {
            return Err(Error::format(i + 1, "vertex weight must be >= 1"));
        }
        let mut canon = Vec::with_capacity(edges.len());
        for (i, &(u, v, w)) in edges.iter().enumerate() {
            if u >= num_vertices || v >= num_vertices {
                return Err(Error::format(i + 1, format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::format(i + 1, format!("self-loop on {u}")));
            }
            if w == 0 {
                return Err(Error::format(i + 1, "edge weight must be >= 1"));
            }
            canon.push((u.min(v), u.max(v), w));
        }
        canon.sort_unstable();
        if let Some(pair) = canon.windows(2).find(|p| p[0].0 == p[1].0 && p[0].1 == p[1].1) {
            return Err(Error::InvalidParameter(format!(
                "duplicate edge ({}, {})",
                pair[0].0, pair[0].1
            )));
        }
        Ok(Self::from_sorted_unique(num_vertices, &canon, vwgt, 0))
    }

    /// `edges` must be sorted, unique, with `u < v`.
    fn from_sorted_unique(n: usize, edges: &[(usize, usize, u64)], vwgt: Vec<u64>, level: usize) -> Self {
        let mut deg = vec![0usize; n];
        for &(u, v, _) in edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        let mut xadj = Vec::with_capacity(n + 1);
        xadj.push(0);
        for d in &deg {
            xadj.push(xadj.last().unwrap() + d);
        }
        let mut fill = xadj[..n].to_vec();
        let mut adjncy = vec![0; xadj[n]];
        let mut adjwgt = vec![0; xadj[n]];
        // Lexicographic edge order appends every list in ascending order.
        for &(u, v, w) in edges {
            adjncy[fill[u]] = v;
            adjwgt[fill[u]] = w;
            fill[u] += 1;
            adjncy[fill[v]] = u;
            adjwgt[fill[v]] = w;
            fill[v] += 1;
        }
        Self {
            xadj,
            adjncy,
            adjwgt,
            vwgt,
            level,
        }
    }

    /// Assembles a graph from per-vertex adjacency lists that are already
    /// symmetric and sorted. Used by coarsening.
    pub(crate) fn from_csr(
        xadj: Vec<usize>,
        adjncy: Vec<usize>,
        adjwgt: Vec<u64>,
        vwgt: Vec<u64>,
        level: usize,
    ) -> Self {
        debug_assert_eq!(xadj.len(), vwgt.len() + 1);
        Self {
            xadj,
            adjncy,
            adjwgt,
            vwgt,
            level,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.vwgt.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adjncy.len() / 2
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjncy[self.xadj[v]..self.xadj[v + 1]]
    }

    pub fn edge_weights(&self, v: usize) -> &[u64] {
        &self.adjwgt[self.xadj[v]..self.xadj[v + 1]]
    }

    pub fn adjacency(&self, v: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.neighbors(v).iter().copied().zip(self.edge_weights(v).iter().copied())
    }

    pub fn vertex_weight(&self, v: usize) -> u64 {
        self.vwgt[v]
    }

    pub fn vertex_weights(&self) -> &[u64] {
        &self.vwgt
    }

    pub fn total_vertex_weight(&self) -> u64 {
        self.vwgt.iter().sum()
    }

    pub fn total_edge_weight(&self) -> u64 {
        self.adjwgt.iter().sum::<u64>() / 2
    }

    /// Unweighted degree: the number of distinct neighbors.
    pub fn degree(&self, v: usize) -> Result<usize> {
        if v >= self.num_vertices() {
            return Err(Error::IndexOutOfRange {
                index: v,
                len: self.num_vertices(),
            });
        }
        Ok(self.xadj[v + 1] - self.xadj[v])
    }

    pub(crate) fn degree_of(&self, v: usize) -> usize {
        self.xadj[v + 1] - self.xadj[v]
    }

    /// Each undirected edge once, as `(u, v, w)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        (0..self.num_vertices()).flat_map(move |u| {
            self.adjacency(u)
                .filter(move |&(v, _)| v > u)
                .map(move |(v, w)| (u, v, w))
        })
    }

    /// Full scan of the structural invariants.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.num_vertices();
        if let Some(v) = self.vwgt.iter().position(|&w| w == 0) {
            return Err(Error::Invariant(format!("vertex {v} has weight 0")));
        }
        for u in 0..n {
            let nbrs = self.neighbors(u);
            if nbrs.windows(2).any(|p| p[0] >= p[1]) {
                return Err(Error::Invariant(format!("adjacency of {u} not strictly sorted")));
            }
            for (v, w) in self.adjacency(u) {
                if v == u {
                    return Err(Error::Invariant(format!("self-loop on {u}")));
                }
                if w == 0 {
                    return Err(Error::Invariant(format!("zero-weight edge ({u}, {v})")));
                }
                let back = self.neighbors(v).binary_search(&u).map(|i| self.edge_weights(v)[i]);
                if back != Ok(w) {
                    return Err(Error::Invariant(format!("edge ({u}, {v}) is not symmetric")));
                }
            }
        }
        Ok(())
    }

    /// The subgraph on `vertices` with every edge whose endpoints are both inside.
    ///
    /// Sub-vertex `i` corresponds to `vertices[i]`; the returned mapping is
    /// exactly that list.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<(SimilarityGraph, Vec<usize>)> {
        if vertices.is_empty() {
            return Err(Error::EmptyVertexSet);
        }
        let n = self.num_vertices();
        let mut local = vec![usize::MAX; n];
        for (i, &v) in vertices.iter().enumerate() {
            if v >= n {
                return Err(Error::IndexOutOfRange { index: v, len: n });
            }
            if local[v] != usize::MAX {
                return Err(Error::InvalidParameter(format!("vertex {v} listed twice")));
            }
            local[v] = i;
        }
        let sorted = vertices.windows(2).all(|p| p[0] < p[1]);
        let mut xadj = Vec::with_capacity(vertices.len() + 1);
        xadj.push(0);
        let mut adjncy = Vec::new();
        let mut adjwgt = Vec::new();
        let mut scratch: Vec<(usize, u64)> = Vec::new();
        for &v in vertices {
            if sorted {
                for (u, w) in self.adjacency(v) {
                    if local[u] != usize::MAX {
                        adjncy.push(local[u]);
                        adjwgt.push(w);
                    }
                }
            } else {
                scratch.clear();
                scratch.extend(
                    self.adjacency(v)
                        .filter(|&(u, _)| local[u] != usize::MAX)
                        .map(|(u, w)| (local[u], w)),
                );
                scratch.sort_unstable();
                for &(u, w) in &scratch {
                    adjncy.push(u);
                    adjwgt.push(w);
                }
            }
            xadj.push(adjncy.len());
        }
        let vwgt = vertices.iter().map(|&v| self.vwgt[v]).collect();
        Ok((
            SimilarityGraph::from_csr(xadj, adjncy, adjwgt, vwgt, self.level),
            vertices.to_vec(),
        ))
    }

    pub fn to_file(&self, k: Option<usize>) -> GraphFile {
        GraphFile {
            num_vertices: self.num_vertices(),
            k,
            edges: self.edges().map(|(u, v, w)| [u as u64, v as u64, w]).collect(),
            vertex_weights: self.vwgt.clone(),
        }
    }
}

/// Total weight of edges whose endpoints lie in different parts.
pub fn edge_cut(g: &SimilarityGraph, partition: &Partition) -> Result<u64> {
    if partition.assignment().len() != g.num_vertices() {
        return Err(Error::PartitionMismatch {
            expected: g.num_vertices(),
            found: partition.assignment().len(),
        });
    }
    Ok(cut_of_assignment(g, partition.assignment()))
}

pub(crate) fn cut_of_assignment(g: &SimilarityGraph, assignment: &[usize]) -> u64 {
    g.edges()
        .filter(|&(u, v, _)| assignment[u] != assignment[v])
        .map(|(_, _, w)| w)
        .sum()
}

/// 8-lane dot product; lane sums are order-fixed so `dot(a, b) == dot(b, a)`.
#[inline]
fn dot(a: &[f32], b: &[f32]) -> f32 {
    let mut acc = [0f32; 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for l in 0..8 {
            acc[l] += x[l] * y[l];
        }
    }
    let mut tail = 0f32;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

/// Ranking order for neighbor candidates: higher similarity first, then lower index.
fn rank(a: &(f32, usize), b: &(f32, usize)) -> std::cmp::Ordering {
    b.0.total_cmp(&a.0).then(a.1.cmp(&b.1))
}

/// The `k` most cosine-similar other rows of every row, in rank order.
pub fn knn_lists(matrix: &EmbeddingMatrix, k: usize) -> Result<Vec<Vec<usize>>> {
    let n = matrix.n();
    if k == 0 || k >= n {
        return Err(Error::InvalidK { k, n });
    }
    let dim = matrix.dim();
    let unit = matrix.normalized();
    let lists = (0..n)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(n),
            |cands: &mut Vec<(f32, usize)>, i| {
                let row = &unit[i * dim..(i + 1) * dim];
                cands.clear();
                cands.extend(
                    unit.chunks_exact(dim)
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(j, other)| (dot(row, other), j)),
                );
                if k < cands.len() {
                    cands.select_nth_unstable_by(k - 1, rank);
                    cands.truncate(k);
                }
                cands.sort_unstable_by(rank);
                cands.iter().map(|&(_, j)| j).collect::<Vec<_>>()
            },
        )
        .collect();
    Ok(lists)
}

/// Connects every instance to its `k` most cosine-similar instances and
/// symmetrizes by union. All weights are 1; ties go to the lower index.
pub fn build_knn_graph(matrix: &EmbeddingMatrix, k: usize) -> Result<SimilarityGraph> {
    let lists = knn_lists(matrix, k)?;
    let n = matrix.n();
    let mut edges: Vec<(usize, usize, u64)> = lists
        .iter()
        .enumerate()
        .flat_map(|(u, list)| list.iter().map(move |&v| (u.min(v), u.max(v), 1)))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    Ok(SimilarityGraph::from_sorted_unique(n, &edges, vec![1; n], 0))
}

/// On-disk graph: `{num_vertices, k, edges: [[u, v, w], ...], vertex_weights}` with `u < v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub num_vertices: usize,
    #[serde(default)]
    pub k: Option<usize>,
    pub edges: Vec<[u64; 3]>,
    pub vertex_weights: Vec<u64>,
}

impl GraphFile {
    pub fn to_graph(&self) -> Result<SimilarityGraph> {
        let n = self.num_vertices;
        let mut edges = Vec::with_capacity(self.edges.len());
        for (i, &[u, v, w]) in self.edges.iter().enumerate() {
            if u >= v {
                return Err(Error::format(i + 1, format!("edge [{u}, {v}] must have u < v")));
            }
            edges.push((u as usize, v as usize, w));
        }
        SimilarityGraph::from_edges(n, &edges, Some(self.vertex_weights.clone())).map_err(|e| match e {
            Error::InvalidParameter(msg) => Error::format(0, msg),
            other => other,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::format(e.line(), e.to_string()))
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::embedding::{cosine_similarity, generate_synthetic};
    use crate::partition::Partition;
    use proptest::prelude::*;

    fn rays(degrees: &[f64]) -> EmbeddingMatrix {
        let rows = degrees
            .iter()
            .map(|d| {
                let r = d.to_radians();
                vec![r.cos() as f32, r.sin() as f32]
            })
            .collect();
        let ids = (0..degrees.len()).map(|i| i.to_string()).collect();
        EmbeddingMatrix::from_rows(ids, rows).unwrap()
    }

    /// All-pairs oracle: acceptable neighbor sets, treating similarities within
    /// 1e-6 of the k-th best as ties.
    fn oracle_knn_ok(m: &EmbeddingMatrix, k: usize, i: usize, got: &[usize]) -> bool {
        let mut sims: Vec<(f64, usize)> = (0..m.n())
            .filter(|&j| j != i)
            .map(|j| (cosine_similarity(m.row(i), m.row(j)).unwrap(), j))
            .collect();
        sims.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let kth = sims[k - 1].0;
        let sure: Vec<usize> = sims.iter().filter(|s| s.0 > kth + 1e-6).map(|s| s.1).collect();
        let maybe: Vec<usize> = sims.iter().filter(|s| s.0 >= kth - 1e-6).map(|s| s.1).collect();
        got.len() == k && sure.iter().all(|j| got.contains(j)) && got.iter().all(|j| maybe.contains(j))
    }

    #[test]
    fn k_equal_n_minus_one_is_complete() {
        let m = generate_synthetic(9, 4, 2, 0.3, 1).unwrap();
        let g = build_knn_graph(&m, 8).unwrap();
        assert_eq!(g.num_edges(), 9 * 8 / 2);
    }

    #[test]
    fn three_rays() {
        let m = rays(&[0.0, 30.0, 60.0]);
        let lists = knn_lists(&m, 1).unwrap();
        assert_eq!(lists[0], vec![1]);
        assert_eq!(lists[2], vec![1]);
        assert!(lists[1] == vec![0] || lists[1] == vec![2]);
        for (i, list) in lists.iter().enumerate() {
            assert!(oracle_knn_ok(&m, 1, i, list));
        }
        let g = build_knn_graph(&m, 1).unwrap();
        let mut expected = vec![(0, 1, 1), (1, 2, 1)];
        expected.sort();
        assert_eq!(g.edges().collect::<Vec<_>>(), expected);
    }

    #[test]
    fn exact_ties_go_to_lower_index() {
        // Rows 1, 2, 3 are identical, so row 0 ties among them.
        let m = EmbeddingMatrix::from_rows(
            (0..4).map(|i| i.to_string()).collect(),
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0, 1.0]],
        )
        .unwrap();
        let lists = knn_lists(&m, 2).unwrap();
        assert_eq!(lists[0], vec![1, 2]);
        assert_eq!(lists[3], vec![1, 2]);
    }

    #[test]
    fn knn_matches_brute_force_oracle() {
        for seed in 0..5 {
            let m = generate_synthetic(60, 8, 3, 0.4, seed).unwrap();
            let lists = knn_lists(&m, 5).unwrap();
            for (i, l) in lists.iter().enumerate() {
                assert!(oracle_knn_ok(&m, 5, i, l), "seed {seed} vertex {i}: {l:?}");
            }
        }
    }

    #[test]
    fn knn_rejects_bad_k() {
        let m = generate_synthetic(5, 2, 1, 0.3, 0).unwrap();
        assert!(matches!(build_knn_graph(&m, 0), Err(Error::InvalidK { .. })));
        assert!(matches!(build_knn_graph(&m, 5), Err(Error::InvalidK { .. })));
    }

    #[test]
    fn knn_graph_structure() {
        let m = generate_synthetic(400, 16, 4, 0.2, 3).unwrap();
        let g = build_knn_graph(&m, 10).unwrap();
        g.check_invariants().unwrap();
        let mut sum = 0;
        for v in 0..g.num_vertices() {
            let d = g.degree(v).unwrap();
            assert!(d >= 10);
            sum += d;
        }
        let mean = sum as f64 / 400.0;
        assert!((10.0..=20.0).contains(&mean), "{mean}");
        assert_eq!(g, build_knn_graph(&m, 10).unwrap());
    }

    #[test]
    fn degree_examples() {
        assert_eq!(star(5).degree(0).unwrap(), 5);
        assert_eq!(graph(3, &[(0, 1)]).degree(2).unwrap(), 0);
        assert_eq!(complete(4).degree(2).unwrap(), 3);
        assert!(matches!(star(2).degree(3), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn induced_subgraph_examples() {
        let g = cycle(4);
        let (all, map) = g.induced_subgraph(&[0, 1, 2, 3]).unwrap();
        assert_eq!(all, g);
        assert_eq!(map, vec![0, 1, 2, 3]);

        let (one, map) = g.induced_subgraph(&[2]).unwrap();
        assert_eq!((one.num_vertices(), one.num_edges()), (1, 0));
        assert_eq!(map, vec![2]);

        let (p, _) = g.induced_subgraph(&[0, 1, 2]).unwrap();
        assert_eq!(p.edges().collect::<Vec<_>>(), vec![(0, 1, 1), (1, 2, 1)]);

        let (q, map) = g.induced_subgraph(&[3, 0, 1]).unwrap();
        q.check_invariants().unwrap();
        assert_eq!(q.num_edges(), 2);
        assert_eq!(map, vec![3, 0, 1]);

        assert!(matches!(g.induced_subgraph(&[]), Err(Error::EmptyVertexSet)));
        assert!(matches!(g.induced_subgraph(&[9]), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn edge_cut_examples() {
        let c4 = cycle(4);
        assert_eq!(edge_cut(&c4, &Partition::trivial(4)).unwrap(), 0);
        let pairs = Partition::from_assignment(vec![0, 0, 1, 1], 2).unwrap();
        assert_eq!(edge_cut(&c4, &pairs).unwrap(), 2);
        let two = graph(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        let split = Partition::from_assignment(vec![0, 0, 0, 1, 1, 1], 2).unwrap();
        assert_eq!(edge_cut(&two, &split).unwrap(), 0);
        let short = Partition::from_assignment(vec![0, 1], 2).unwrap();
        assert!(matches!(edge_cut(&c4, &short), Err(Error::PartitionMismatch { .. })));
    }

    #[test]
    fn from_edges_validation() {
        assert!(SimilarityGraph::from_edges(3, &[(0, 0, 1)], None).is_err());
        assert!(SimilarityGraph::from_edges(3, &[(0, 1, 0)], None).is_err());
        assert!(SimilarityGraph::from_edges(3, &[(0, 1, 1), (1, 0, 1)], None).is_err());
        assert!(SimilarityGraph::from_edges(3, &[(0, 3, 1)], None).is_err());
        assert!(SimilarityGraph::from_edges(2, &[], Some(vec![1, 0])).is_err());
    }

    #[test]
    fn graph_file_round_trip() {
        let g = bridged_triangles();
        let f = g.to_file(Some(2));
        let text = serde_json::to_string(&f).unwrap();
        let back: GraphFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_graph().unwrap(), g);
        let mut bad = f.clone();
        bad.edges[0] = [1, 0, 1];
        assert!(matches!(bad.to_graph(), Err(Error::Format { .. })));
    }

    fn random_graph() -> impl Strategy<Value = SimilarityGraph> {
        (2usize..30).prop_flat_map(|n| {
            prop::collection::vec((0..n, 0..n, 1u64..5), 0..80).prop_map(move |raw| {
                let mut e: Vec<_> = raw
                    .into_iter()
                    .filter(|(u, v, _)| u != v)
                    .map(|(u, v, w)| (u.min(v), u.max(v), w))
                    .collect();
                e.sort();
                e.dedup_by_key(|x| (x.0, x.1));
                SimilarityGraph::from_edges(n, &e, None).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn cut_plus_internal_is_total(g in random_graph(), parts in 1usize..5, seed in any::<u64>()) {
            g.check_invariants().unwrap();
            let n = g.num_vertices();
            let assignment: Vec<usize> = (0..n).map(|v| (crate::rng::derive_seed(seed, &[v as u64]) % parts as u64) as usize).collect();
            let cut = cut_of_assignment(&g, &assignment);
            let internal: u64 = g.edges().filter(|&(u, v, _)| assignment[u] == assignment[v]).map(|e| e.2).sum();
            prop_assert_eq!(cut + internal, g.total_edge_weight());
        }
    }
}
