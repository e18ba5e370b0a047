// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use serde::Serialize;

use super::records::TrialRecord;

/// 97.5% standard normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval at 95% for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementSummary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryStats {
    pub group: String,
    pub trials: usize,
    pub measurements: BTreeMap<String, MeasurementSummary>,
}

impl SummaryStats {
    pub fn mean(&self, key: &str) -> Option<f64> {
        self.measurements.get(key).map(|m| m.mean)
    }

    pub fn interval(&self, key: &str) -> Option<(f64, f64)> {
        self.measurements
            .get(key)
            .and_then(|m| Some((m.ci_low?, m.ci_high?)))
    }
}

/// Summarizes records that share `group`; `binary` names get Wilson CIs.
pub fn summarize(group: &str, records: &[&TrialRecord], binary: &[&str]) -> SummaryStats {
    let mut keys: Vec<&String> = records.iter().flat_map(|r| r.measurements.keys()).collect();
    keys.sort();
    keys.dedup();
    let mut measurements = BTreeMap::new();
    for key in keys {
        let values: Vec<f64> = records.iter().filter_map(|r| r.get(key)).collect();
        if values.is_empty() {
            continue;
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (ci_low, ci_high) = if binary.contains(&key.as_str()) {
            let hits = values.iter().filter(|&&v| v == 1.0).count() as u64;
            let (lo, hi) = wilson_interval(hits, values.len() as u64);
            (Some(lo), Some(hi))
        } else {
            (None, None)
        };
        measurements.insert(
            key.clone(),
            MeasurementSummary {
                mean,
                min,
                max,
                ci_low,
                ci_high,
            },
        );
    }
    SummaryStats {
        group: group.to_string(),
        trials: records.len(),
        measurements,
    }
}

/// Groups records by label in first-appearance order and summarizes each group.
pub fn summarize_groups(records: &[TrialRecord], binary: &[&str]) -> Vec<SummaryStats> {
    let mut order: Vec<&str> = Vec::new();
    for r in records {
        if !order.contains(&r.group.as_str()) {
            order.push(&r.group);
        }
    }
    order
        .into_iter()
        .map(|g| {
            let members: Vec<&TrialRecord> = records.iter().filter(|r| r.group == g).collect();
            summarize(g, &members, binary)
        })
        .collect()
}

#[derive(Serialize)]
struct CsvRow<'a> {
    group: &'a str,
    measurement: &'a str,
    trials: usize,
    mean: f64,
    min: f64,
    max: f64,
    ci_low: Option<f64>,
    ci_high: Option<f64>,
}

pub fn to_csv(summaries: &[SummaryStats]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for s in summaries {
        for (name, m) in &s.measurements {
            w.serialize(CsvRow {
                group: &s.group,
                measurement: name,
                trials: s.trials,
                mean: m.mean,
                min: m.min,
                max: m.max,
                ci_low: m.ci_low,
                ci_high: m.ci_high,
            })?;
        }
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}
