// SPDX-License-Identifier: Apache-2.0

//! The corner distribution on which a k-d tree with `d = log2(n / n0)` levels
//! answers exactly: every split lands in the thin center band, so a corner
//! query's leaf contains a ball of radius 1/10 around it.

use std::collections::BTreeMap;

use kdbound_core::distributions::CornerParams;
use kdbound_core::search::{brute_force_nn, comprehensive_search, defeatist_search};
use kdbound_core::{DataSet, KdTree, ProductDistribution, Sampler, TreeConfig};

use super::{
    require, run_trials, sample_data, summarize_groups, trial_error, Check, ExperimentOutput,
    RunOptions, TrialRecord,
};
use crate::error::{Error, Result};

pub const NAME: &str = "example1";

/// Default ceiling on `n * d` (coordinates held by one trial).
pub const DEFAULT_MEMORY_BUDGET: u128 = 50_000_000;

pub const RATE_KEYS: [&str; 6] = [
    "splits_in_band",
    "q_corner",
    "all_corners_occupied",
    "defeatist_correct",
    "single_leaf",
    "premise",
];

#[derive(Debug, Clone)]
pub struct Example1Params {
    pub d: usize,
    pub n0: Option<usize>,
    pub n: Option<usize>,
    pub trials: usize,
    pub memory_budget: u128,
    /// Floors on observed rates, keyed by entries of [`RATE_KEYS`].
    pub min_rates: BTreeMap<String, f64>,
}

impl Example1Params {
    pub fn new(d: usize, trials: usize) -> Self {
        Example1Params {
            d,
            n0: None,
            n: None,
            trials,
            memory_budget: DEFAULT_MEMORY_BUDGET,
            min_rates: BTreeMap::new(),
        }
    }

    /// The `(n, n0)` actually used: overrides first, then `n = n0 2^d`.
    pub fn sizes(&self) -> Result<(usize, usize)> {
        let cp = CornerParams::for_dimension(self.d)?;
        let n0 = self.n0.unwrap_or(cp.n0);
        let n = match self.n {
            Some(n) => n,
            None => u32::try_from(self.d)
                .ok()
                .and_then(|e| 1usize.checked_shl(e))
                .filter(|_| self.d < usize::BITS as usize)
                .and_then(|p| p.checked_mul(n0))
                .ok_or(Error::MemoryBudget {
                    requested: u128::MAX,
                    budget: self.memory_budget,
                })?,
        };
        Ok((n, n0))
    }
}

/// Union-bound failure probabilities for events (a), (b), (c).
pub fn union_bounds(cp: &CornerParams, n: usize, n0: usize) -> [f64; 3] {
    let m = cp.m_center;
    let d = cp.d as f64;
    let a = 2.0 * n as f64 * (-(n0 as f64) * m * m / 2.0).exp();
    let b = d * m;
    let c = (d * std::f64::consts::LN_2 - n0 as f64 * (1.0 - m).powf(d)).exp();
    [a, b, c]
}

fn in_band(x: f64, band: (f64, f64)) -> bool {
    band.0 <= x && x <= band.1
}

/// Index of the corner containing `p`, or `None` if some coordinate is center.
fn corner_of(p: &[f64], band: (f64, f64)) -> Option<u64> {
    let mut bits = 0u64;
    for (axis, &x) in p.iter().enumerate() {
        if in_band(x, band) {
            return None;
        }
        if x > 0.5 {
            bits |= 1 << axis;
        }
    }
    Some(bits)
}

fn all_corners_occupied(data: &DataSet, band: (f64, f64)) -> bool {
    let d = data.dim();
    if d >= 63 || (1usize << d) > data.len() {
        return false;
    }
    let corners = 1usize << d;
    let mut seen = vec![0u64; corners.div_ceil(64)];
    let mut count = 0usize;
    for p in data.rows() {
        if let Some(c) = corner_of(p, band) {
            let (w, b) = (c as usize / 64, c % 64);
            if seen[w] & (1 << b) == 0 {
                seen[w] |= 1 << b;
                count += 1;
                if count == corners {
                    return true;
                }
            }
        }
    }
    false
}

pub fn run(params: &Example1Params, opts: &RunOptions) -> Result<ExperimentOutput> {
    require(params.d >= 2, "example1 needs d >= 2")?;
    require(params.trials >= 1, "need at least one trial")?;
    let cp = CornerParams::for_dimension(params.d)?;
    let (n, n0) = params.sizes()?;
    require(n >= 1 && n0 >= 1, "n and n0 must be positive")?;
    let requested = n as u128 * params.d as u128;
    if requested > params.memory_budget {
        return Err(Error::MemoryBudget {
            requested,
            budget: params.memory_budget,
        });
    }
    let dist = ProductDistribution::corner(params.d)?;
    let band = cp.band();
    let group = format!("d={}", params.d);

    let records = run_trials(opts, params.trials, |trial| {
        let seed = opts.trial_seed(0, trial);
        let mut sampler = Sampler::new(seed);
        let data = sample_data(&dist, &mut sampler, n)?;
        let mut q = Vec::with_capacity(params.d);
        dist.sample_point(&mut sampler, &mut q);
        let corners = all_corners_occupied(&data, band);
        let tree = KdTree::build(data, TreeConfig::new(n0))?;

        let splits_in_band = tree
            .split_rules()
            .all(|(_, rule, _)| in_band(rule.threshold, band));
        let q_corner = corner_of(&q, band).is_some();
        let def = defeatist_search(&tree, &q)?;
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
        let correct = def.index == oracle.index;
        let single = com.visited_leaves == 1;
        let premise = splits_in_band && q_corner && corners;
        if premise && !(correct && single) {
            return Err(trial_error(
                NAME,
                trial,
                seed,
                format!(
                    "events (a), (b), (c) hold but defeatist_correct = {correct}, visited_leaves = {}",
                    com.visited_leaves
                ),
            ));
        }

        let mut r = TrialRecord::new(NAME, &group, trial, seed)
            .param("distribution", "corner")
            .param("n", n)
            .param("n0", n0)
            .param("d", params.d)
            .param("query", "random");
        r.set("splits_in_band", splits_in_band);
        r.set("q_corner", q_corner);
        r.set("all_corners_occupied", corners);
        r.set("defeatist_correct", correct);
        r.set("single_leaf", single);
        r.set("premise", premise);
        r.set("visited_leaves", com.visited_leaves);
        r.set("total_leaves", tree.leaf_count());
        r.set("depth", tree.depth());
        r.set("nn_distance", oracle.distance);
        Ok(r)
    })?;

    let summaries = summarize_groups(&records, &RATE_KEYS);
    let premises = records.iter().filter(|r| r.flag("premise")).count();
    let mut checks = vec![Check::new(
        "implication",
        true,
        format!(
            "{premises}/{} trials met (a), (b), (c); each was exact in one leaf",
            records.len()
        ),
    )];
    let s = &summaries[0];
    for (key, &floor) in &params.min_rates {
        let rate = s
            .mean(key)
            .ok_or_else(|| Error::Params(format!("unknown example1 rate {key:?}")))?;
        checks.push(Check::new(
            format!("min_rate[{key}]"),
            rate >= floor,
            format!("rate {rate:.4} vs floor {floor}"),
        ));
    }

    let bounds = union_bounds(&cp, n, n0);
    let mut notes = vec![format!(
        "n = {n}, n0 = {n0}; union bounds on failure of (a), (b), (c): {:.3e}, {:.3e}, {:.3e}",
        bounds[0], bounds[1], bounds[2]
    )];
    if bounds.iter().sum::<f64>() >= 1.0 {
        notes.push("outside asymptotic regime: the union bounds sum to at least 1".into());
    }
    Ok(ExperimentOutput {
        name: NAME,
        records,
        summaries,
        checks,
        notes,
    })
}
