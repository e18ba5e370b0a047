// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Measurement {
    Int(i64),
    Real(f64),
}

impl Measurement {
    pub fn as_f64(self) -> f64 {
        match self {
            Measurement::Int(v) => v as f64,
            Measurement::Real(v) => v,
        }
    }
}

impl From<bool> for Measurement {
    fn from(b: bool) -> Self {
        Measurement::Int(b as i64)
    }
}

impl From<usize> for Measurement {
    fn from(v: usize) -> Self {
        Measurement::Int(v as i64)
    }
}

impl From<f64> for Measurement {
    fn from(v: f64) -> Self {
        Measurement::Real(v)
    }
}

/// One trial's parameters and measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub experiment: String,
    /// Parameter-group label, e.g. `d=8`.
    pub group: String,
    pub trial: u64,
    pub seed: u64,
    pub params: BTreeMap<String, Value>,
    pub measurements: BTreeMap<String, Measurement>,
}

impl TrialRecord {
    pub fn new(experiment: &str, group: &str, trial: u64, seed: u64) -> Self {
        TrialRecord {
            experiment: experiment.to_string(),
            group: group.to_string(),
            trial,
            seed,
            params: BTreeMap::new(),
            measurements: BTreeMap::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn set(&mut self, key: &str, value: impl Into<Measurement>) {
        self.measurements.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.measurements.get(key).map(|m| m.as_f64())
    }

    pub fn flag(&self, key: &str) -> bool {
        self.get(key) == Some(1.0)
    }
}

pub fn to_json_lines(records: &[TrialRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}
