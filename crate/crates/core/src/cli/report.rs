use serde::Serialize;

use crate::coefficient::CoefficientResult;
use crate::comparison::FcrResult;
use crate::ranking::TiePolicy;
use crate::resampling::ConvergenceReport;
use crate::result_model::{MetricRegistry, MetricSpec, TestId};

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputDigest {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub path: String,
    pub sha256: String,
}

/// Everything needed to reproduce the numbers in a run: inputs by digest,
/// the metric registry, ranking settings and every computed result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub inputs: Vec<InputDigest>,
    pub registry: Vec<MetricSpec>,
    pub tie_policy: TiePolicy,
    pub tie_epsilon: f64,
    pub n_tests: usize,
    pub n_algorithms: usize,
    pub n_seeds: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub coefficients: Vec<CoefficientResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_ties: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fcr: Option<FcrResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rng_seed: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub dropped_tests: Vec<TestId>,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn new(command: &'static str, registry: &MetricRegistry, tie_policy: TiePolicy, tie_epsilon: f64) -> Self {
        RunReport {
            tool: TOOL_NAME,
            version: TOOL_VERSION,
            command,
            inputs: Vec::new(),
            registry: registry.iter().cloned().collect(),
            tie_policy,
            tie_epsilon,
            n_tests: 0,
            n_algorithms: 0,
            n_seeds: 0,
            coefficients: Vec::new(),
            n_ties: None,
            fcr: None,
            convergence: None,
            rng_seed: None,
            dropped_tests: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    /// Coefficient rows: `coefficient,tie_policy,dataset,metric,value`. The
    /// suite-level value has empty dataset and metric; `n_ties` is a final row.
    pub fn coefficients_csv(&self) -> crate::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["coefficient", "tie_policy", "dataset", "metric", "value"])?;
        for c in &self.coefficients {
            let (name, policy) = (c.coefficient.as_str(), c.tie_policy.as_str());
            w.write_record([name, policy, "", "", &c.value.to_string()])?;
            for t in &c.per_test {
                w.write_record([name, policy, &t.dataset, &t.metric, &t.value.to_string()])?;
            }
        }
        if let Some(n) = self.n_ties {
            w.write_record(["n_ties", self.tie_policy.as_str(), "", "", &n.to_string()])?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf-8"))
    }

    /// `framework,fcr,units,granularity`.
    pub fn fcr_csv(&self) -> crate::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["framework", "fcr", "units", "granularity"])?;
        if let Some(f) = &self.fcr {
            for (label, v) in f.labels.iter().zip(&f.fcr) {
                w.write_record([
                    label.as_str(),
                    &v.to_string(),
                    &f.units.to_string(),
                    f.granularity.as_str(),
                ])?;
            }
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf-8"))
    }
}
