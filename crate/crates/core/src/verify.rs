//! Audit of greedy residual-degree selection against exhaustive search on
//! small random graphs.
//!
//! Greedy coverage is guaranteed to reach `1 - 1/e` of the optimum, so a
//! miss is reported as an internal error. Exact optimality is not
//! guaranteed; those instances are archived as counterexamples.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SimilarityGraph;
use crate::rng;
use crate::select::{
    brute_force_max_coverage, coverage_objective, greedy_select_traced, MAX_BRUTE_FORCE_VERTICES,
};

pub const GREEDY_BOUND: f64 = 1.0 - 1.0 / std::f64::consts::E;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub max_n: usize,
    pub max_budget: usize,
    pub instances: usize,
    pub seed: u64,
    /// Edge probabilities, used round-robin over the random instances.
    pub edge_probabilities: Vec<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            max_n: 12,
            max_budget: 4,
            instances: 500,
            seed: 0,
            edge_probabilities: vec![0.2, 0.5, 0.8],
        }
    }
}

/// One audited graph with the greedy and optimal answers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub name: String,
    pub n: usize,
    pub budget: usize,
    pub edge_probability: Option<f64>,
    pub edges: Vec<[usize; 2]>,
    pub greedy: Vec<usize>,
    pub greedy_value: usize,
    pub optimum: Vec<usize>,
    pub optimum_value: usize,
}

impl Instance {
    pub fn ratio(&self) -> f64 {
        if self.optimum_value == 0 {
            1.0
        } else {
            self.greedy_value as f64 / self.optimum_value as f64
        }
    }
}

/// A greedy pick whose recorded residual degree was not the maximum, or
/// disagreed with a from-scratch recount.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArgmaxViolation {
    pub instance: String,
    pub step: usize,
    pub vertex: usize,
    pub recorded: usize,
    pub recounted: usize,
    pub best_remaining: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub options: VerifyOptions,
    pub instances: usize,
    pub exact_optimal: usize,
    pub exact_pass_rate: f64,
    pub min_ratio: f64,
    pub bound: f64,
    pub greedy_picks: usize,
    pub argmax_violations: Vec<ArgmaxViolation>,
    /// Fixed fixtures, always included.
    pub fixtures: Vec<Instance>,
    /// Instances where greedy fell short of the optimum.
    pub counterexamples: Vec<Instance>,
}

/// Residual degree of every vertex after removing `removed`, counted from
/// the edge list.
fn recount_residual(n: usize, edges: &[[usize; 2]], removed: &[bool]) -> Vec<usize> {
    let mut deg = vec![0; n];
    for &[u, v] in edges {
        if !removed[u] && !removed[v] {
            deg[u] += 1;
            deg[v] += 1;
        }
    }
    deg
}

fn audit(
    name: String,
    n: usize,
    budget: usize,
    p: Option<f64>,
    edges: Vec<[usize; 2]>,
    violations: &mut Vec<ArgmaxViolation>,
) -> Result<Instance> {
    let pairs: Vec<(usize, usize, u64)> = edges.iter().map(|&[u, v]| (u, v, 1)).collect();
    let g = SimilarityGraph::from_edges(n, &pairs, None)?;
    let traced = greedy_select_traced(&g, budget)?;
    let mut removed = vec![false; n];
    for (step, &(vertex, recorded)) in traced.iter().enumerate() {
        let deg = recount_residual(n, &edges, &removed);
        let best_remaining = (0..n).filter(|&v| !removed[v]).map(|v| deg[v]).max().unwrap_or(0);
        if recorded != deg[vertex] || deg[vertex] < best_remaining {
            violations.push(ArgmaxViolation {
                instance: name.clone(),
                step,
                vertex,
                recorded,
                recounted: deg[vertex],
                best_remaining,
            });
        }
        removed[vertex] = true;
    }
    let greedy: Vec<usize> = traced.iter().map(|&(v, _)| v).collect();
    let greedy_value = coverage_objective(&g, &greedy)?;
    let (optimum, optimum_value) = brute_force_max_coverage(&g, budget)?;
    let inst = Instance {
        name,
        n,
        budget,
        edge_probability: p,
        edges,
        greedy,
        greedy_value,
        optimum,
        optimum_value,
    };
    if inst.ratio() < GREEDY_BOUND {
        return Err(Error::Invariant(format!(
            "greedy coverage {} below (1 - 1/e) of optimum {} on {}",
            inst.greedy_value, inst.optimum_value, inst.name
        )));
    }
    Ok(inst)
}

fn random_edges<R: Rng>(n: usize, p: f64, r: &mut R) -> Vec<[usize; 2]> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.gen_bool(p) {
                edges.push([u, v]);
            }
        }
    }
    edges
}

/// Runs the audit: `instances` random graphs with `1..=max_n` vertices and
/// budgets `1..=min(max_budget, n)`, plus fixed fixtures (the 5-vertex path
/// at budget 2, and graphs where the budget equals the vertex count).
pub fn run_verify(opts: &VerifyOptions) -> Result<VerifyReport> {
    if opts.max_n == 0 || opts.max_n > MAX_BRUTE_FORCE_VERTICES {
        return Err(Error::InvalidParameter(format!(
            "max_n must be in 1..={MAX_BRUTE_FORCE_VERTICES}, got {}",
            opts.max_n
        )));
    }
    if opts.max_budget == 0 {
        return Err(Error::InvalidParameter("max_budget must be >= 1".into()));
    }
    if opts.edge_probabilities.is_empty()
        || opts.edge_probabilities.iter().any(|p| !(0.0..=1.0).contains(p))
    {
        return Err(Error::InvalidParameter("edge probabilities must lie in [0, 1]".into()));
    }
    let mut violations = Vec::new();

    let mut fixtures = vec![audit(
        "path-5".into(),
        5,
        2,
        None,
        (0..4).map(|i| [i, i + 1]).collect(),
        &mut violations,
    )?];
    let mut fixed_rng = rng::stream(opts.seed, &[u64::MAX]);
    for n in 1..=opts.max_budget.min(opts.max_n) {
        let edges = random_edges(n, 0.5, &mut fixed_rng);
        fixtures.push(audit(format!("full-budget-{n}"), n, n, Some(0.5), edges, &mut violations)?);
    }

    let mut random = Vec::with_capacity(opts.instances);
    for i in 0..opts.instances {
        let mut r = rng::stream(opts.seed, &[i as u64]);
        let p = opts.edge_probabilities[i % opts.edge_probabilities.len()];
        let n = r.gen_range(1..=opts.max_n);
        let budget = r.gen_range(1..=opts.max_budget.min(n));
        let edges = random_edges(n, p, &mut r);
        random.push(audit(format!("random-{i}"), n, budget, Some(p), edges, &mut violations)?);
    }

    let all = || fixtures.iter().chain(&random);
    let total = fixtures.len() + random.len();
    let exact_optimal = all().filter(|i| i.greedy_value == i.optimum_value).count();
    let min_ratio = all().map(Instance::ratio).fold(1.0, f64::min);
    let greedy_picks = all().map(|i| i.budget).sum();
    let counterexamples = all()
        .filter(|i| i.greedy_value < i.optimum_value)
        .cloned()
        .collect();
    Ok(VerifyReport {
        options: opts.clone(),
        instances: total,
        exact_optimal,
        exact_pass_rate: exact_optimal as f64 / total as f64,
        min_ratio,
        bound: GREEDY_BOUND,
        greedy_picks,
        argmax_violations: violations,
        fixtures,
        counterexamples,
    })
}
