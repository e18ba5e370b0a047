// SPDX-License-Identifier: Apache-2.0

//! Checked-in thresholds measured by pilot runs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::DistributionType;

pub const EXPECTATIONS_JSON: &str = include_str!("../expectations.json");
pub const EXPECTATIONS_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefeatistExpectation {
    pub distribution: DistributionType,
    pub n: usize,
    pub n0: usize,
    pub d: usize,
    pub min_success_rate: f64,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisitExpectation {
    pub min_all_visited_rate: f64,
    pub max_growth_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example1Expectation {
    pub d: usize,
    pub n0: usize,
    pub n: usize,
    pub trials: usize,
    pub min_rates: BTreeMap<String, f64>,
    /// Rates observed by the pilot that set the floors.
    pub pilot_rates: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expectations {
    pub version: u32,
    pub defeatist_success: Vec<DefeatistExpectation>,
    pub comprehensive_visits: VisitExpectation,
    pub example1: Vec<Example1Expectation>,
    pub notes: Vec<String>,
}

impl Expectations {
    pub fn bundled() -> Self {
        Self::parse(EXPECTATIONS_JSON).expect("bundled expectations parse")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let e: Expectations = serde_json::from_str(text)?;
        if e.version != EXPECTATIONS_VERSION {
            return Err(Error::Version {
                what: "expectations",
                found: e.version,
            });
        }
        Ok(e)
    }

    pub fn defeatist(
        &self,
        distribution: DistributionType,
        n: usize,
        n0: usize,
        d: usize,
    ) -> Option<f64> {
        self.defeatist_success
            .iter()
            .find(|e| e.distribution == distribution && e.n == n && e.n0 == n0 && e.d == d)
            .map(|e| e.min_success_rate)
    }

    pub fn example1(&self, d: usize, n: usize, n0: usize) -> Option<&Example1Expectation> {
        self.example1
            .iter()
            .find(|e| e.d == d && e.n == n && e.n0 == n0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_parses() {
        let e = Expectations::bundled();
        assert_eq!(
            e.defeatist(DistributionType::Uniform, 16384, 256, 2),
            Some(0.9)
        );
        assert_eq!(e.defeatist(DistributionType::Uniform, 16384, 256, 3), None);
        assert_eq!(e.comprehensive_visits.max_growth_factor, 2.0);
    }

    #[test]
    fn version_checked() {
        let text = EXPECTATIONS_JSON.replacen("\"version\": 1", "\"version\": 9", 1);
        assert!(Expectations::parse(&text).is_err());
    }
}
