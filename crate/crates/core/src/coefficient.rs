//! Result types shared by the randomness coefficients.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ranking::TiePolicy;
use crate::result_model::TestId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Coefficient {
    /// One minus mean Kendall's W.
    #[serde(rename = "w")]
    W,
    /// One minus mean tie-corrected Kendall's W.
    #[serde(rename = "w_tied")]
    WTied,
    /// One minus mean normalised pairwise Wasserstein-1 distance.
    #[serde(rename = "w_wasserstein")]
    WWasserstein,
}

impl Coefficient {
    pub const ALL: [Coefficient; 3] = [Coefficient::W, Coefficient::WTied, Coefficient::WWasserstein];

    pub fn as_str(self) -> &'static str {
        match self {
            Coefficient::W => "w",
            Coefficient::WTied => "w_tied",
            Coefficient::WWasserstein => "w_wasserstein",
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Coefficient {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "w" => Ok(Coefficient::W),
            "w_tied" => Ok(Coefficient::WTied),
            "w_wasserstein" => Ok(Coefficient::WWasserstein),
            other => Err(format!(
                "coefficient must be one of w, w_tied, w_wasserstein; got `{other}`"
            )),
        }
    }
}

/// Per-test concordance-style value feeding an aggregate coefficient.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestValue {
    pub dataset: String,
    pub metric: String,
    #[serde(rename = "w")]
    pub value: f64,
}

impl TestValue {
    pub fn new(test: &TestId, value: f64) -> Self {
        TestValue {
            dataset: test.dataset.clone(),
            metric: test.metric.clone(),
            value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientResult {
    pub coefficient: Coefficient,
    pub tie_policy: TiePolicy,
    pub value: f64,
    pub per_test: Vec<TestValue>,
    /// Tied groups over every test and seed the coefficient was computed on.
    pub n_ties: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// `1 - mean(values)`, summed strictly in the given order.
pub fn one_minus_mean<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let (sum, count) = values.into_iter().fold((0.0_f64, 0_usize), |(s, c), v| (s + v, c + 1));
    1.0 - sum / count as f64
}
