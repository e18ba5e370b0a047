// SPDX-License-Identifier: Apache-2.0

//! Expected L1 diameter of the query's leaf cell, plus the mass-weighted
//! per-level diameter profile `A(l)`.

use kdbound_core::bounds::leaf_l1_diameter_bound;
use kdbound_core::{KdTree, NodeId, ProductDistribution, Sampler, TreeConfig};

use super::{
    require, run_trials, sample_data, summarize_groups, Check, ExperimentOutput, RunOptions,
    TrialRecord,
};
use crate::error::Result;
use crate::format::DistributionConfig;

pub const NAME: &str = "diameter";

/// Slack allowed when checking that the profile does not increase.
const PROFILE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct DiameterParams {
    pub distribution: DistributionConfig,
    pub n: usize,
    pub n0: usize,
    pub d_grid: Vec<usize>,
    /// Total queries per dimension.
    pub queries: usize,
    /// Queries answered by each freshly built tree.
    pub queries_per_tree: usize,
}

impl DiameterParams {
    pub fn new(
        distribution: DistributionConfig,
        n: usize,
        n0: usize,
        d_grid: Vec<usize>,
        queries: usize,
    ) -> Self {
        DiameterParams {
            distribution,
            n,
            n0,
            d_grid,
            queries,
            queries_per_tree: 100,
        }
    }
}

/// `A(l)` for `l = 0..=depth`. A leaf above the deepest level keeps
/// contributing to every later level, so the profile covers the whole box.
pub fn diameter_profile(tree: &KdTree, dist: &ProductDistribution) -> Result<Vec<f64>> {
    let depth = tree.depth();
    let mut profile = vec![0.0; depth + 1];
    for (i, node) in tree.nodes().iter().enumerate() {
        let cell = tree.cell_of_node(NodeId(i))?;
        let w = dist.cell_mass(cell) * cell.l1_diameter();
        let last = if node.is_leaf() { depth } else { node.level() };
        for a in &mut profile[node.level()..=last] {
            *a += w;
        }
    }
    Ok(profile)
}

pub fn run(params: &DiameterParams, opts: &RunOptions) -> Result<ExperimentOutput> {
    require(params.n >= 1 && params.n0 >= 1, "n and n0 must be positive")?;
    require(
        params.queries >= 1 && params.queries_per_tree >= 1,
        "need at least one query",
    )?;
    require(!params.d_grid.is_empty(), "d-grid is empty")?;
    let trees = params.queries.div_ceil(params.queries_per_tree);

    let mut records = Vec::new();
    let mut checks = Vec::new();
    for (gi, &d) in params.d_grid.iter().enumerate() {
        let dist_cfg = params.distribution.with_dim(d);
        let dist = dist_cfg.build()?;
        let group = format!("{},d={d}", dist_cfg.label());
        let bound = leaf_l1_diameter_bound(params.n, params.n0, d);
        let batch = run_trials(opts, trees, |trial| {
            let seed = opts.trial_seed(gi as u64, trial);
            let mut sampler = Sampler::new(seed);
            let data = sample_data(&dist, &mut sampler, params.n)?;
            let tree = KdTree::build(data, TreeConfig::new(params.n0))?;
            let start = trial as usize * params.queries_per_tree;
            let count = params.queries_per_tree.min(params.queries - start);
            let mut q = Vec::with_capacity(d);
            let mut total = 0.0;
            for _ in 0..count {
                q.clear();
                dist.sample_point(&mut sampler, &mut q);
                total += tree.cell_of_node(tree.locate_leaf(&q)?)?.l1_diameter();
            }
            let profile = diameter_profile(&tree, &dist)?;
            let nonincreasing = profile.windows(2).all(|w| w[1] <= w[0] + PROFILE_TOLERANCE);
            let mut r = TrialRecord::new(NAME, &group, trial, seed)
                .param("distribution", dist_cfg.label())
                .param("n", params.n)
                .param("n0", params.n0)
                .param("d", d)
                .param("query", "random")
                .param("a_profile", profile.clone());
            r.set("queries", count);
            r.set("leaf_l1_diameter_sum", total);
            r.set("mean_leaf_l1_diameter", total / count as f64);
            r.set("a0", profile[0]);
            r.set("a_nonincreasing", nonincreasing);
            Ok(r)
        })?;

        let sum: f64 = batch
            .iter()
            .map(|r| r.get("leaf_l1_diameter_sum").unwrap())
            .sum();
        let mean = sum / params.queries as f64;
        checks.push(Check::new(
            format!("diameter_bound[{group}]"),
            mean <= bound,
            format!("mean {mean:.4} vs 6d(n0/n)^(1/d) = {bound:.4}"),
        ));
        let a0_exact = batch.iter().all(|r| r.get("a0") == Some(d as f64));
        checks.push(Check::new(
            format!("a0_equals_d[{group}]"),
            a0_exact,
            format!("A(0) = {d} in every tree"),
        ));
        let mono = batch.iter().filter(|r| r.flag("a_nonincreasing")).count();
        checks.push(Check::new(
            format!("profile_nonincreasing[{group}]"),
            mono == batch.len(),
            format!("{mono}/{} trees", batch.len()),
        ));
        records.extend(batch);
    }

    let summaries = summarize_groups(&records, &["a_nonincreasing"]);
    Ok(ExperimentOutput {
        name: NAME,
        records,
        summaries,
        checks,
        notes: Vec::new(),
    })
}
