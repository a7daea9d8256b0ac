//! Cross-module properties of the selectors and the synthetic generator.

use std::collections::HashSet;

use proptest::prelude::*;

use fastgas::select::{kmeans, subcluster_select, PageRankParams};
use fastgas::{
    build_knn_graph, fastgas_select, generate_synthetic, generate_synthetic_labeled, greedy_select,
    pagerank_select, random_select, top_degree_select, SelectionResult, SyntheticSpec,
};

fn assert_valid(r: &SelectionResult, n: usize, budget: usize) {
    assert_eq!(r.selected.len(), budget.min(n));
    let uniq: HashSet<_> = r.selected.iter().collect();
    assert_eq!(uniq.len(), r.selected.len());
    assert!(r.selected.iter().all(|&v| v < n));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn selectors_return_distinct_in_range_picks(
        n in 30usize..300,
        budget in 1usize..30,
        parts in 1usize..8,
        seed in 0u64..1000,
    ) {
        let pool = generate_synthetic(n, 8, 3, 0.3, seed).unwrap();
        let g = build_knn_graph(&pool, 5).unwrap();
        let runs = [
            fastgas_select(&g, parts, budget, seed).unwrap(),
            random_select(n, budget, seed).unwrap(),
            top_degree_select(&g, budget).unwrap(),
            pagerank_select(&g, budget, &PageRankParams::default()).unwrap(),
            subcluster_select(&pool, parts.min(budget), budget, seed, 50).unwrap(),
        ];
        for r in &runs {
            assert_valid(r, n, budget);
        }
        prop_assert_eq!(&fastgas_select(&g, parts, budget, seed).unwrap().selected, &runs[0].selected);
        prop_assert_eq!(&subcluster_select(&pool, parts.min(budget), budget, seed, 50).unwrap().selected, &runs[4].selected);
    }

    #[test]
    fn one_part_is_plain_greedy(n in 20usize..200, budget in 1usize..20, seed in 0u64..100) {
        let g = build_knn_graph(&generate_synthetic(n, 6, 2, 0.4, seed).unwrap(), 5).unwrap();
        prop_assert_eq!(fastgas_select(&g, 1, budget, seed).unwrap().selected, greedy_select(&g, budget).unwrap());
    }
}

#[test]
fn random_selections_overlap_like_a_hypergeometric_draw() {
    // Expected overlap of two independent 100-of-3000 draws is 100 * 100 / 3000.
    for s in 0..50u64 {
        let a: HashSet<usize> = random_select(3000, 100, 2 * s).unwrap().selected.into_iter().collect();
        let b = random_select(3000, 100, 2 * s + 1).unwrap().selected;
        let overlap = b.iter().filter(|v| a.contains(v)).count();
        assert!(overlap <= 20, "seeds {} / {}: overlap {overlap}", 2 * s, 2 * s + 1);
    }
}

/// Best label agreement over all bijections, by bitmask DP.
fn agreement(a: &[usize], b: &[usize], k: usize) -> f64 {
    let mut c = vec![vec![0usize; k]; k];
    for (&x, &y) in a.iter().zip(b) {
        c[x][y] += 1;
    }
    let mut best = vec![0usize; 1 << k];
    for mask in 0usize..1 << k {
        let i = mask.count_ones() as usize;
        if i < k {
            for j in (0..k).filter(|j| mask & (1 << j) == 0) {
                best[mask | 1 << j] = best[mask | 1 << j].max(best[mask] + c[i][j]);
            }
        }
    }
    best[(1 << k) - 1] as f64 / a.len() as f64
}

#[test]
fn kmeans_recovers_the_generator_clusters() {
    let pool = generate_synthetic_labeled(SyntheticSpec::new(3000, 768, 10, 0.1, 7)).unwrap();
    let all: Vec<usize> = (0..3000).collect();
    let km = kmeans(&pool.matrix, &all, 10, 100, &mut fastgas::rng::stream(7, &[0])).unwrap();
    let score = agreement(&km.assignment, &pool.labels, 10);
    assert!(score >= 0.99, "agreement {score}");
}
