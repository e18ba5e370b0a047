// SPDX-License-Identifier: Apache-2.0

//! Cost of comprehensive search: leaves visited per query over an `(n, d)` grid.

use kdbound_core::bounds::all_leaves_visited_lower_bound;
use kdbound_core::search::{brute_force_nn, comprehensive_search};
use kdbound_core::{KdTree, Sampler, TreeConfig};

use super::{
    distinct, require, run_trials, sample_data, summarize_groups, trial_error, Check,
    ExperimentOutput, QueryMode, RunOptions, TrialRecord,
};
use crate::error::Result;
use crate::format::DistributionConfig;

pub const NAME: &str = "comprehensive-visits";

#[derive(Debug, Clone)]
pub struct VisitParams {
    pub distribution: DistributionConfig,
    pub n_grid: Vec<usize>,
    pub d_grid: Vec<usize>,
    pub n0: usize,
    pub trials: usize,
    pub query: QueryMode,
    /// Floor on the every-leaf-visited rate, applied to every group.
    pub min_all_visited_rate: Option<f64>,
    /// Ceiling on `mean visits(n) / mean visits(smallest n)` for each `d`.
    pub max_growth_factor: Option<f64>,
}

impl VisitParams {
    pub fn uniform(n_grid: Vec<usize>, d_grid: Vec<usize>, n0: usize, trials: usize) -> Self {
        VisitParams {
            distribution: DistributionConfig::uniform(1),
            n_grid,
            d_grid,
            n0,
            trials,
            query: QueryMode::Random,
            min_all_visited_rate: None,
            max_growth_factor: None,
        }
    }
}

/// Whether the closed-form every-leaf bound reaches `floor` in every group.
pub fn bound_supports_floor(params: &VisitParams, floor: f64) -> Result<bool> {
    for &d in &params.d_grid {
        let density_max = params.distribution.with_dim(d).build()?.density_bounds().1;
        for &n in &params.n_grid {
            match all_leaves_visited_lower_bound(n, params.n0, d, density_max) {
                Some(b) if b >= floor => {}
                _ => return Ok(false),
            }
        }
    }
    Ok(true)
}

pub fn run(params: &VisitParams, opts: &RunOptions) -> Result<ExperimentOutput> {
    require(
        !params.n_grid.is_empty() && !params.d_grid.is_empty(),
        "empty grid",
    )?;
    require(
        params.n0 >= 1 && params.trials >= 1,
        "n0 and trials must be positive",
    )?;
    require(
        distinct(&params.n_grid) && distinct(&params.d_grid),
        "grid has repeated entries",
    )?;

    let mut records = Vec::new();
    let mut notes = Vec::new();
    let mut gi = 0u64;
    for &d in &params.d_grid {
        let dist_cfg = params.distribution.with_dim(d);
        let dist = dist_cfg.build()?;
        let density_max = dist.density_bounds().1;
        for &n in &params.n_grid {
            let group = format!("n={n},d={d}");
            let bound = all_leaves_visited_lower_bound(n, params.n0, d, density_max);
            if let Some(b) = bound {
                notes.push(format!("{group}: every-leaf lower bound {b:.6}"));
            }
            let batch = run_trials(opts, params.trials, |trial| {
                let seed = opts.trial_seed(gi, trial);
                let mut sampler = Sampler::new(seed);
                let data = sample_data(&dist, &mut sampler, n)?;
                let q = params.query.draw(&dist, &mut sampler)?;
                let tree = KdTree::build(data, TreeConfig::new(params.n0))?;
                let com = comprehensive_search(&tree, &q)?;
                let oracle = brute_force_nn(tree.data(), &q)?;
                if com.index != oracle.index {
                    return Err(trial_error(
                        NAME,
                        trial,
                        seed,
                        format!(
                            "comprehensive returned {} but the oracle says {}",
                            com.index, oracle.index
                        ),
                    ));
                }
                let total = tree.leaf_count();
                let mut r = TrialRecord::new(NAME, &group, trial, seed)
                    .param("distribution", dist_cfg.label())
                    .param("n", n)
                    .param("n0", params.n0)
                    .param("d", d)
                    .param("query", params.query.label());
                r.set("visited_leaves", com.visited_leaves);
                r.set("total_leaves", total);
                r.set("all_leaves_visited", com.visited_leaves == total);
                r.set("backtracks", com.backtracks);
                r.set("distance_computations", com.distance_computations);
                Ok(r)
            })?;
            records.extend(batch);
            gi += 1;
        }
    }

    let summaries = summarize_groups(&records, &["all_leaves_visited"]);
    let mut checks = Vec::new();
    checks.push(Check::new(
        "oracle_equivalence",
        true,
        format!(
            "{} comprehensive answers matched brute force",
            records.len()
        ),
    ));

    if let Some(min) = params.min_all_visited_rate {
        for s in &summaries {
            let rate = s.mean("all_leaves_visited").unwrap_or(0.0);
            checks.push(Check::new(
                format!("all_leaves_rate[{}]", s.group),
                rate >= min,
                format!("rate {rate:.4} vs floor {min}"),
            ));
        }
    }

    if let Some(factor) = params.max_growth_factor {
        if params.n_grid.len() >= 2 {
            let mut ns = params.n_grid.clone();
            ns.sort();
            for &d in &params.d_grid {
                let mean = |n: usize| {
                    summaries
                        .iter()
                        .find(|s| s.group == format!("n={n},d={d}"))
                        .and_then(|s| s.mean("visited_leaves"))
                        .unwrap()
                };
                let base = mean(ns[0]);
                let means: Vec<f64> = ns.iter().map(|&n| mean(n)).collect();
                let worst = means.iter().copied().fold(0.0, f64::max);
                let listing: Vec<String> = ns
                    .iter()
                    .zip(&means)
                    .map(|(n, m)| format!("n={n}:{m:.2}"))
                    .collect();
                checks.push(Check::new(
                    format!("n_independence[d={d}]"),
                    worst <= factor * base,
                    format!("{} (limit {:.2})", listing.join(" "), factor * base),
                ));
            }
        }
    }

    Ok(ExperimentOutput {
        name: NAME,
        records,
        summaries,
        checks,
        notes,
    })
}
