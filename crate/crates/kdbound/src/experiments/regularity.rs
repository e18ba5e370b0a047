// SPDX-License-Identifier: Apache-2.0

//! Audits every leaf of uniform-data trees for aspect ratio and mass.

use kdbound_core::bounds::{cell_regularity_lower_bound, leaf_mass_window, MAX_REGULAR_ASPECT};
use kdbound_core::{KdTree, ProductDistribution, Sampler, TreeConfig};

use super::{
    require, run_trials, sample_data, summarize_groups, Check, ExperimentOutput, RunOptions,
    TrialRecord,
};
use crate::error::Result;

pub const NAME: &str = "cell-regularity";

#[derive(Debug, Clone, Copy)]
pub struct RegularityParams {
    pub n: usize,
    pub n0: usize,
    pub d: usize,
    pub trees: usize,
}

pub fn run(params: &RegularityParams, opts: &RunOptions) -> Result<ExperimentOutput> {
    require(params.n0 >= 11, "the regularity audit needs n0 >= 11")?;
    require(
        params.n >= 1 && params.d >= 1 && params.trees >= 1,
        "n, d and trees must be positive",
    )?;
    let dist = ProductDistribution::uniform(params.d)?;
    let (mass_lo, mass_hi) = leaf_mass_window(params.n, params.n0);
    let group = format!("n={},n0={},d={}", params.n, params.n0, params.d);

    let records = run_trials(opts, params.trees, |trial| {
        let seed = opts.trial_seed(0, trial);
        let mut sampler = Sampler::new(seed);
        let data = sample_data(&dist, &mut sampler, params.n)?;
        let tree = KdTree::build(data, TreeConfig::new(params.n0))?;
        let leaves = tree.leaves();
        let mut aspect_violations = 0usize;
        let mut mass_violations = 0usize;
        let mut max_aspect = 0.0f64;
        let (mut min_mass, mut max_mass) = (f64::INFINITY, 0.0f64);
        for &leaf in &leaves {
            let cell = tree.cell_of_node(leaf)?;
            match cell.aspect_ratio() {
                Ok(a) => {
                    max_aspect = max_aspect.max(a);
                    if a > MAX_REGULAR_ASPECT {
                        aspect_violations += 1;
                    }
                }
                Err(_) => {
                    max_aspect = f64::INFINITY;
                    aspect_violations += 1;
                }
            }
            let mass = dist.cell_mass(cell);
            min_mass = min_mass.min(mass);
            max_mass = max_mass.max(mass);
            if mass < mass_lo || mass > mass_hi {
                mass_violations += 1;
            }
        }
        let mut r = TrialRecord::new(NAME, &group, trial, seed)
            .param("distribution", "uniform")
            .param("n", params.n)
            .param("n0", params.n0)
            .param("d", params.d);
        r.set("leaves", leaves.len());
        r.set("aspect_violations", aspect_violations);
        r.set("mass_violations", mass_violations);
        r.set("max_leaf_aspect_ratio", max_aspect);
        r.set("min_leaf_mass", min_mass);
        r.set("max_leaf_mass", max_mass);
        Ok(r)
    })?;

    let summaries = summarize_groups(&records, &[]);
    let aspect: f64 = records
        .iter()
        .map(|r| r.get("aspect_violations").unwrap())
        .sum();
    let mass: f64 = records
        .iter()
        .map(|r| r.get("mass_violations").unwrap())
        .sum();
    let worst = records
        .iter()
        .map(|r| r.get("max_leaf_aspect_ratio").unwrap())
        .fold(0.0, f64::max);
    let checks = vec![
        Check::new(
            "aspect_ratio",
            aspect == 0.0,
            format!("{aspect} leaves above {MAX_REGULAR_ASPECT}; worst {worst:.4}"),
        ),
        Check::new(
            "leaf_mass",
            mass == 0.0,
            format!("{mass} leaves outside [{mass_lo:.3e}, {mass_hi:.3e}]"),
        ),
    ];
    let formal = cell_regularity_lower_bound(params.n, params.n0);
    let mut notes = vec![format!(
        "formal guarantee 1 - 3n exp(-c n0) = {formal:.4} at these parameters"
    )];
    if formal <= 0.0 {
        notes.push(
            "the formal guarantee is vacuous here; zero violations is an empirical finding".into(),
        );
    }
    Ok(ExperimentOutput {
        name: NAME,
        records,
        summaries,
        checks,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_cells_are_intervals() {
        let p = RegularityParams {
            n: 48,
            n0: 12,
            d: 1,
            trees: 3,
        };
        let out = run(&p, &RunOptions::new(5, 1)).unwrap();
        for r in &out.records {
            assert_eq!(r.get("max_leaf_aspect_ratio"), Some(1.0));
            assert_eq!(r.get("leaves"), Some(4.0));
        }
        assert!(out.check("aspect_ratio").unwrap().passed);
    }

    #[test]
    fn root_only_tree() {
        // n < 2 n0: the root is the single leaf, aspect 1 and mass 1.
        let p = RegularityParams {
            n: 20,
            n0: 11,
            d: 4,
            trees: 1,
        };
        let out = run(&p, &RunOptions::new(5, 1)).unwrap();
        let r = &out.records[0];
        assert_eq!(r.get("max_leaf_aspect_ratio"), Some(1.0));
        assert_eq!(r.get("max_leaf_mass"), Some(1.0));
    }

    #[test]
    fn small_n0_rejected() {
        let p = RegularityParams {
            n: 100,
            n0: 4,
            d: 2,
            trees: 1,
        };
        assert!(run(&p, &RunOptions::new(5, 1)).is_err());
    }
}
