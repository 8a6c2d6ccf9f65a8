use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::numerics::RngStream;

/// One verification outcome in the shared JSON report layout.
///
/// `wall_time_ms` is `null` unless timing was requested, so reports produced
/// from the same inputs are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub inputs: BTreeMap<String, String>,
    pub statistic: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residual: Option<f64>,
    pub threshold: f64,
    pub pass: bool,
    pub seed: Option<RngStream>,
    pub n: Option<usize>,
    pub wall_time_ms: Option<u64>,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>) -> Self {
        VerificationReport {
            check: check.into(),
            inputs: BTreeMap::new(),
            statistic: f64::NAN,
            p_value: None,
            residual: None,
            threshold: f64::NAN,
            pass: false,
            seed: None,
            n: None,
            wall_time_ms: None,
        }
    }

    pub fn input(mut self, key: &str, value: impl ToString) -> Self {
        self.inputs.insert(key.to_string(), value.to_string());
        self
    }

    /// A p-value test that passes when `p_value > level`.
    pub fn with_p_value(mut self, statistic: f64, p_value: f64, level: f64) -> Self {
        self.statistic = statistic;
        self.p_value = Some(p_value);
        self.threshold = level;
        self.pass = p_value > level;
        self
    }

    /// A residual that passes when it is below `tolerance`.
    pub fn with_residual_below(mut self, residual: f64, tolerance: f64) -> Self {
        self.statistic = residual;
        self.residual = Some(residual);
        self.threshold = tolerance;
        self.pass = residual < tolerance;
        self
    }

    /// A negative control that passes when the residual exceeds `floor`.
    pub fn with_residual_above(mut self, residual: f64, floor: f64) -> Self {
        self.statistic = residual;
        self.residual = Some(residual);
        self.threshold = floor;
        self.pass = residual > floor;
        self
    }

    pub fn sampled(mut self, seed: RngStream, n: usize) -> Self {
        self.seed = Some(seed);
        self.n = Some(n);
        self
    }
}
