// SPDX-License-Identifier: Apache-2.0

//! Seeded Monte-Carlo experiments.
//!
//! Every trial owns its own random stream, seeded from the master seed and
//! its `(group, trial)` coordinates. Trials run on a dedicated thread pool
//! and results are collected in trial order, so output bytes do not depend on
//! the parallelism degree.

pub mod comprehensive;
pub mod defeatist;
pub mod diameter;
pub mod example1;
pub mod median;
pub mod records;
pub mod regularity;
pub mod summary;

use std::path::{Path, PathBuf};

use kdbound_core::sampler::derive_seed;
use kdbound_core::{DataSet, ProductDistribution, Sampler};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use records::{Measurement, TrialRecord};
pub use summary::{summarize_groups, wilson_interval, SummaryStats};

pub const EXPERIMENT_NAMES: [&str; 6] = [
    "defeatist-success",
    "comprehensive-visits",
    "cell-regularity",
    "diameter",
    "median-concentration",
    "example1",
];

/// How each trial picks its query point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryMode {
    /// Drawn from the data distribution, after the data points.
    Random,
    /// The same point in every trial.
    Fixed(Vec<f64>),
}

impl QueryMode {
    pub fn label(&self) -> String {
        match self {
            QueryMode::Random => "random".into(),
            QueryMode::Fixed(q) => format!("fixed:{q:?}"),
        }
    }

    pub(crate) fn draw(
        &self,
        dist: &ProductDistribution,
        sampler: &mut Sampler,
    ) -> Result<Vec<f64>> {
        match self {
            QueryMode::Random => {
                let mut q = Vec::with_capacity(dist.dim());
                dist.sample_point(sampler, &mut q);
                Ok(q)
            }
            QueryMode::Fixed(q) if q.len() == 1 => Ok(vec![q[0]; dist.dim()]),
            QueryMode::Fixed(q) if q.len() == dist.dim() => Ok(q.clone()),
            QueryMode::Fixed(q) => Err(Error::Params(format!(
                "fixed query has {} coordinates, distribution has {}",
                q.len(),
                dist.dim()
            ))),
        }
    }
}

/// Execution knobs shared by all experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub seed: u64,
    pub parallelism: usize,
}

impl RunOptions {
    pub fn new(seed: u64, parallelism: usize) -> Self {
        RunOptions {
            seed,
            parallelism: parallelism.max(1),
        }
    }

    /// Seed for trial `trial` of parameter group `group`.
    pub fn trial_seed(&self, group: u64, trial: u64) -> u64 {
        derive_seed(derive_seed(self.seed, group), trial)
    }
}

/// One pass/fail verdict against an expectation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub name: &'static str,
    pub records: Vec<TrialRecord>,
    pub summaries: Vec<SummaryStats>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl ExperimentOutput {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn summary(&self, group: &str) -> Option<&SummaryStats> {
        self.summaries.iter().find(|s| s.group == group)
    }

    pub fn json_lines(&self) -> String {
        records::to_json_lines(&self.records)
    }

    pub fn csv(&self) -> Result<String> {
        Ok(summary::to_csv(&self.summaries)?)
    }

    /// Writes `<name>.jsonl` and `<name>.csv` under `dir`; returns both paths.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let jsonl = dir.join(format!("{}.jsonl", self.name));
        let csv = dir.join(format!("{}.csv", self.name));
        std::fs::write(&jsonl, self.json_lines()).map_err(|e| Error::io(&jsonl, e))?;
        std::fs::write(&csv, self.csv()?).map_err(|e| Error::io(&csv, e))?;
        Ok((jsonl, csv))
    }

    /// Human-readable digest: one line per check and per note.
    pub fn report(&self) -> String {
        let mut out = format!("{}: {} records\n", self.name, self.records.len());
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("  [{tag}] {}: {}\n", c.name, c.detail));
        }
        for n in &self.notes {
            out.push_str(&format!("  note: {n}\n"));
        }
        out
    }
}

/// Runs `count` trials of one group on `parallelism` threads, preserving
/// trial order. The reported error, if any, is the one with the lowest index.
pub(crate) fn run_trials<T, F>(opts: &RunOptions, count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let results: Vec<Result<T>> = if opts.parallelism <= 1 {
        (0..count as u64).map(&f).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.parallelism)
            .build()
            .map_err(|e| Error::Pool(e.to_string()))?;
        pool.install(|| (0..count as u64).into_par_iter().map(&f).collect())
    };
    results.into_iter().collect()
}

pub(crate) fn sample_data(
    dist: &ProductDistribution,
    sampler: &mut Sampler,
    n: usize,
) -> Result<DataSet> {
    Ok(dist.sample(sampler, n)?)
}

pub(crate) fn trial_error(
    experiment: &'static str,
    trial: u64,
    seed: u64,
    message: impl Into<String>,
) -> Error {
    Error::Trial {
        experiment,
        trial,
        seed,
        message: message.into(),
    }
}

pub(crate) fn distinct<T: Ord + Clone>(xs: &[T]) -> bool {
    let mut v = xs.to_vec();
    v.sort();
    v.windows(2).all(|w| w[0] != w[1])
}

pub(crate) fn require(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Params(what.to_string()))
    }
}
