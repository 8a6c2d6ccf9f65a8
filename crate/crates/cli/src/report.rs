use std::collections::BTreeMap;

use lwmy::verifier::VerificationReport;
use serde::{Deserialize, Serialize};

/// Pass count of one named check across seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub check: String,
    pub passes: usize,
    pub total: usize,
    pub required: usize,
    pub pass: bool,
}

/// Everything a suite run produced, in declaration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub parameters: BTreeMap<String, String>,
    /// Laws, maps and profiles the suite exercised.
    pub setup: BTreeMap<String, String>,
    pub seeds: Vec<u64>,
    pub pass: bool,
    pub summary: Vec<CheckSummary>,
    pub reports: Vec<VerificationReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_ms: Option<u64>,
}

impl SuiteReport {
    /// Groups `reports` by check name (first appearance order) and requires
    /// `required(total)` passes of each.
    pub fn assemble(
        suite: &str,
        parameters: BTreeMap<String, String>,
        setup: BTreeMap<String, String>,
        seeds: Vec<u64>,
        reports: Vec<VerificationReport>,
        required: impl Fn(usize) -> usize,
    ) -> Self {
        let mut summary: Vec<CheckSummary> = Vec::new();
        for r in &reports {
            let entry = match summary.iter_mut().position(|s| s.check == r.check) {
                Some(i) => &mut summary[i],
                None => {
                    summary.push(CheckSummary {
                        check: r.check.clone(),
                        passes: 0,
                        total: 0,
                        required: 0,
                        pass: false,
                    });
                    summary.last_mut().unwrap()
                }
            };
            entry.total += 1;
            entry.passes += usize::from(r.pass);
        }
        for s in &mut summary {
            s.required = required(s.total);
            s.pass = s.passes >= s.required;
        }
        SuiteReport {
            suite: suite.to_string(),
            parameters,
            setup,
            seeds,
            pass: !summary.is_empty() && summary.iter().all(|s| s.pass),
            summary,
            reports,
            wall_time_ms: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("suite report serializes");
        s.push('\n');
        s
    }
}
