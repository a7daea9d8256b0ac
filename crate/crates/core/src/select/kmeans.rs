use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;

use super::{allocate_quotas, Method, SelectionResult};
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::rng;
use crate::timing::elapsed_ms;

pub const DEFAULT_KMEANS_ITERS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeans {
    pub centroids: Vec<Vec<f64>>,
    /// Cluster of each member, by position in the `members` slice.
    pub assignment: Vec<usize>,
    pub iterations: usize,
}

fn sq_dist(a: &[f32], c: &[f64]) -> f64 {
    a.iter()
        .zip(c)
        .map(|(&x, &y)| {
            let d = f64::from(x) - y;
            d * d
        })
        .sum()
}

fn nearest(point: &[f32], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(point, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Lloyd's algorithm on the rows `members` of `matrix`, Euclidean distance.
///
/// Seeding is farthest-point: a random first center, then repeatedly the
/// member farthest from its nearest center (earliest member on ties).
/// Assignment ties go to the lower cluster index; an emptied cluster keeps
/// its previous centroid.
pub fn kmeans<R: Rng + ?Sized>(
    matrix: &EmbeddingMatrix,
    members: &[usize],
    k: usize,
    max_iters: usize,
    rng: &mut R,
) -> Result<KMeans> {
    let m = members.len();
    if k == 0 || k > m {
        return Err(Error::InvalidParts { parts: k, n: m });
    }
    let row = |i: usize| matrix.row(members[i]);
    let to_f64 = |r: &[f32]| r.iter().map(|&x| f64::from(x)).collect::<Vec<f64>>();

    let mut centroids = vec![to_f64(row(rng.gen_range(0..m)))];
    let mut closest: Vec<f64> = (0..m).map(|i| sq_dist(row(i), &centroids[0])).collect();
    while centroids.len() < k {
        let mut far = 0;
        for i in 1..m {
            if closest[i] > closest[far] {
                far = i;
            }
        }
        let c = to_f64(row(far));
        for (i, d) in closest.iter_mut().enumerate() {
            *d = d.min(sq_dist(row(i), &c));
        }
        centroids.push(c);
    }

    let dim = matrix.dim();
    let mut assignment = vec![usize::MAX; m];
    let mut iterations = 0;
    while iterations < max_iters {
        iterations += 1;
        let mut changed = false;
        for (i, a) in assignment.iter_mut().enumerate() {
            let (c, _) = nearest(row(i), &centroids);
            if *a != c {
                *a = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0f64; dim]; k];
        let mut counts = vec![0usize; k];
        for (i, &c) in assignment.iter().enumerate() {
            counts[c] += 1;
            for (s, &x) in sums[c].iter_mut().zip(row(i)) {
                *s += f64::from(x);
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                let inv = 1.0 / counts[c] as f64;
                centroids[c] = sums[c].iter().map(|s| s * inv).collect();
            }
        }
    }
    Ok(KMeans {
        centroids,
        assignment,
        iterations,
    })
}

/// Two-level clustering baseline: `k` top-level k-means groups, each split
/// into as many sub-clusters as its budget quota; every sub-cluster
/// contributes the member nearest its centroid.
///
/// Sub-clusters that end up empty are backfilled with the group's
/// lowest-index unpicked members so each group meets its quota.
pub fn subcluster_select(
    matrix: &EmbeddingMatrix,
    k: usize,
    budget: usize,
    seed: u64,
    max_iters: usize,
) -> Result<SelectionResult> {
    let n = matrix.n();
    if budget > n {
        return Err(Error::BudgetExceedsPool { budget, n });
    }
    if k == 0 || k > budget {
        return Err(Error::InvalidParts { parts: k, n: budget });
    }
    let start = Instant::now();
    let all: Vec<usize> = (0..n).collect();
    let top = kmeans(matrix, &all, k, max_iters, &mut rng::stream(seed, &[0]))?;
    let mut groups = vec![Vec::new(); k];
    for (v, &c) in top.assignment.iter().enumerate() {
        groups[c].push(v);
    }
    let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
    let quotas = allocate_quotas(&sizes, budget)?;

    let mut per_part = BTreeMap::new();
    let mut selected = Vec::with_capacity(budget);
    for (gi, (group, &quota)) in groups.iter().zip(&quotas).enumerate() {
        if quota == 0 {
            continue;
        }
        let sub = kmeans(matrix, group, quota, max_iters, &mut rng::stream(seed, &[1, gi as u64]))?;
        let mut best: Vec<Option<(f64, usize)>> = vec![None; quota];
        for (i, &c) in sub.assignment.iter().enumerate() {
            let d = sq_dist(matrix.row(group[i]), &sub.centroids[c]);
            if best[c].is_none_or(|(bd, _)| d < bd) {
                best[c] = Some((d, group[i]));
            }
        }
        let mut picks: Vec<usize> = best.iter().flatten().map(|&(_, v)| v).collect();
        for &v in group {
            if picks.len() == quota {
                break;
            }
            if !picks.contains(&v) {
                picks.push(v);
            }
        }
        selected.extend_from_slice(&picks);
        per_part.insert(gi, picks);
    }

    let mut result = SelectionResult::flat(Method::Subcluster, budget, Some(seed), selected);
    result.parts = Some(k);
    result.per_part = per_part;
    result.timings.set("select", elapsed_ms(start));
    result.timings.set("total", elapsed_ms(start));
    Ok(result)
}
