// SPDX-License-Identifier: Apache-2.0

//! Concentration of the median of `n - k` uniform points on `[0, t]` plus `k`
//! adversarially placed fixed points.
//!
//! Each simulation draws the random points once and evaluates both tails: the
//! fixed points sit at `t/2 + delta` for the upper tail and at `t/2 - delta`
//! for the lower tail. The reported deviation probability is the sum of the
//! two worst-case tail rates.

use std::collections::BTreeMap;

use kdbound_core::bounds::fixed_point_median_tail_bound;
use kdbound_core::{median_with_fixed_points, Sampler};

use super::summary::MeasurementSummary;
use super::{
    require, run_trials, wilson_interval, Check, ExperimentOutput, RunOptions, SummaryStats,
    TrialRecord,
};
use crate::error::{Error, Result};

pub const NAME: &str = "median-concentration";

/// Simulations carried by one trial record.
pub const CHUNK: usize = 1000;

#[derive(Debug, Clone)]
pub struct MedianParams {
    pub n_grid: Vec<usize>,
    pub k_grid: Vec<usize>,
    pub t: f64,
    pub delta_grid: Vec<f64>,
    /// Simulated medians per grid cell.
    pub trials: usize,
}

struct Cell {
    n: usize,
    k: usize,
    delta: f64,
    bound: f64,
}

fn cells(params: &MedianParams) -> Result<Vec<Cell>> {
    let mut out = Vec::new();
    for &n in &params.n_grid {
        for &k in &params.k_grid {
            for &delta in &params.delta_grid {
                let bound = fixed_point_median_tail_bound(n, k, params.t, delta).map_err(|e| {
                    Error::Params(format!("n={n}, k={k}, t={}, delta={delta}: {e}", params.t))
                })?;
                out.push(Cell { n, k, delta, bound });
            }
        }
    }
    Ok(out)
}

fn rate_summary(hits: u64, sims: u64) -> MeasurementSummary {
    let (lo, hi) = wilson_interval(hits, sims);
    MeasurementSummary {
        mean: hits as f64 / sims as f64,
        min: if hits == sims { 1.0 } else { 0.0 },
        max: if hits > 0 { 1.0 } else { 0.0 },
        ci_low: Some(lo),
        ci_high: Some(hi),
    }
}

fn constant(v: f64) -> MeasurementSummary {
    MeasurementSummary {
        mean: v,
        min: v,
        max: v,
        ci_low: None,
        ci_high: None,
    }
}

pub fn run(params: &MedianParams, opts: &RunOptions) -> Result<ExperimentOutput> {
    require(params.t > 0.0 && params.t.is_finite(), "t must be positive")?;
    require(params.trials >= 1, "need at least one simulation")?;
    require(
        !params.n_grid.is_empty() && !params.k_grid.is_empty() && !params.delta_grid.is_empty(),
        "empty grid",
    )?;
    let grid = cells(params)?;
    let chunks = params.trials.div_ceil(CHUNK);
    let t = params.t;

    let mut records = Vec::new();
    let mut summaries = Vec::new();
    let mut checks = Vec::new();
    for (gi, cell) in grid.iter().enumerate() {
        let group = format!("n={},k={},delta={}", cell.n, cell.k, cell.delta);
        let upper_at = t / 2.0 + cell.delta;
        let lower_at = t / 2.0 - cell.delta;
        let batch = run_trials(opts, chunks, |chunk| {
            let seed = opts.trial_seed(gi as u64, chunk);
            let mut sampler = Sampler::new(seed);
            let sims = CHUNK.min(params.trials - chunk as usize * CHUNK);
            let mut random = vec![0.0; cell.n - cell.k];
            let mut scratch = Vec::with_capacity(cell.n);
            let (mut upper, mut lower) = (0usize, 0usize);
            for _ in 0..sims {
                for x in random.iter_mut() {
                    *x = t * sampler.next_f64();
                }
                if median_with_fixed_points(&random, upper_at, cell.k, &mut scratch) >= upper_at {
                    upper += 1;
                }
                if median_with_fixed_points(&random, lower_at, cell.k, &mut scratch) <= lower_at {
                    lower += 1;
                }
            }
            let mut r = TrialRecord::new(NAME, &group, chunk, seed)
                .param("n", cell.n)
                .param("k", cell.k)
                .param("t", t)
                .param("delta", cell.delta)
                .param("distribution", "uniform");
            r.set("simulations", sims);
            r.set("upper_tail_hits", upper);
            r.set("lower_tail_hits", lower);
            Ok(r)
        })?;

        let total = |key: &str| {
            batch
                .iter()
                .map(|r| r.get(key).unwrap() as u64)
                .sum::<u64>()
        };
        let sims = total("simulations");
        let upper = total("upper_tail_hits");
        let lower = total("lower_tail_hits");
        let empirical = (upper + lower) as f64 / sims as f64;
        checks.push(Check::new(
            format!("tail_bound[{group}]"),
            empirical <= cell.bound,
            format!(
                "empirical {empirical:.3e} vs bound {:.3e} over {sims} medians",
                cell.bound
            ),
        ));
        let mut measurements = BTreeMap::new();
        measurements.insert("upper_tail".to_string(), rate_summary(upper, sims));
        measurements.insert("lower_tail".to_string(), rate_summary(lower, sims));
        measurements.insert("deviation_probability".to_string(), constant(empirical));
        measurements.insert("bound".to_string(), constant(cell.bound));
        summaries.push(SummaryStats {
            group,
            trials: sims as usize,
            measurements,
        });
        records.extend(batch);
    }

    Ok(ExperimentOutput {
        name: NAME,
        records,
        summaries,
        checks,
        notes: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, k: usize, delta: f64, trials: usize) -> MedianParams {
        MedianParams {
            n_grid: vec![n],
            k_grid: vec![k],
            t: 1.0,
            delta_grid: vec![delta],
            trials,
        }
    }

    #[test]
    fn no_randomness_is_rejected() {
        let err = run(&params(10, 10, 0.2, 10), &RunOptions::new(1, 1)).unwrap_err();
        assert!(err.to_string().contains("k < n"), "{err}");
    }

    #[test]
    fn weak_delta_names_inequality() {
        let err = run(&params(20, 5, 0.1, 10), &RunOptions::new(1, 1)).unwrap_err();
        assert!(
            err.to_string().contains("delta / t > k / (2 (n - k))"),
            "{err}"
        );
    }

    #[test]
    fn trial_count_is_exact() {
        let out = run(&params(50, 2, 0.2, 2500), &RunOptions::new(4, 2)).unwrap();
        assert_eq!(out.records.len(), 3);
        assert_eq!(out.summaries[0].trials, 2500);
        assert!(out.passed(), "{}", out.report());
    }

    #[test]
    fn tails_symmetric_without_fixed_points() {
        let out = run(&params(21, 0, 0.05, 20_000), &RunOptions::new(9, 1)).unwrap();
        let s = &out.summaries[0];
        let up = s.mean("upper_tail").unwrap();
        let lo = s.mean("lower_tail").unwrap();
        // Each tail of the 11th of 21 uniforms beyond 0.55 is about 0.32.
        assert!((up - lo).abs() < 0.03, "{up} {lo}");
    }
}
