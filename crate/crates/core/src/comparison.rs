//! Framework Comparison Rank: head-to-head ranking of evaluation regimes
//! (for example default hyperparameters against tuned ones) over the suite.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ranking::{rank_row, TiePolicy};
use crate::result_model::{resolve_failures, ResultTable};

#[derive(Debug, Clone)]
pub struct FrameworkResult {
    pub label: String,
    pub table: ResultTable,
}

impl FrameworkResult {
    pub fn new(label: impl Into<String>, table: ResultTable) -> Self {
        FrameworkResult {
            label: label.into(),
            table,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Granularity {
    /// One unit per (algorithm, dataset, metric), scores averaged over seeds.
    #[default]
    PerAlgorithmTest,
    /// One unit per (dataset, metric), scores averaged over seeds and algorithms.
    PerTest,
}

impl Granularity {
    pub fn as_str(self) -> &'static str {
        match self {
            Granularity::PerAlgorithmTest => "per-algorithm-test",
            Granularity::PerTest => "per-test",
        }
    }
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Granularity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "per-algorithm-test" => Ok(Granularity::PerAlgorithmTest),
            "per-test" => Ok(Granularity::PerTest),
            other => Err(format!(
                "granularity must be `per-algorithm-test` or `per-test`, got `{other}`"
            )),
        }
    }
}

impl Serialize for Granularity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FcrResult {
    /// Framework labels in input order.
    pub labels: Vec<String>,
    /// Mean rank per framework, aligned with `labels`.
    pub fcr: Vec<f64>,
    /// Summed ranks per framework in half units; these total `units * f(f+1)` exactly.
    pub rank_sums_half_units: Vec<u64>,
    pub units: usize,
    pub granularity: Granularity,
}

impl FcrResult {
    pub fn get(&self, label: &str) -> Option<f64> {
        self.labels.iter().position(|l| l == label).map(|i| self.fcr[i])
    }
}

impl Serialize for FcrResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Fragment<'a> {
            fcr: BTreeMap<&'a str, f64>,
            units: usize,
            granularity: Granularity,
        }
        Fragment {
            fcr: self
                .labels
                .iter()
                .map(String::as_str)
                .zip(self.fcr.iter().copied())
                .collect(),
            units: self.units,
            granularity: self.granularity,
        }
        .serialize(s)
    }
}

fn check_shared(frameworks: &[FrameworkResult]) -> Result<()> {
    if frameworks.len() < 2 {
        return Err(Error::FrameworkMismatch(format!(
            "need at least two frameworks, got {}",
            frameworks.len()
        )));
    }
    let base = &frameworks[0];
    for f in &frameworks[1..] {
        if f.label == base.label || frameworks.iter().filter(|g| g.label == f.label).count() > 1 {
            return Err(Error::FrameworkMismatch(format!("duplicate label `{}`", f.label)));
        }
        let mismatch =
            |what: &str| Error::FrameworkMismatch(format!("`{}` and `{}` differ in {what}", base.label, f.label));
        if f.table.algorithms() != base.table.algorithms() {
            return Err(mismatch("algorithms"));
        }
        if f.table.suite() != base.table.suite() {
            return Err(mismatch("test suite"));
        }
        if f.table.registry() != base.table.registry() {
            return Err(mismatch("metric registry"));
        }
    }
    Ok(())
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (s, c) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    s / c as f64
}

/// Ranks frameworks against each other on every comparison unit (mean ranks
/// for ties) and averages each framework's rank over the units. Failed runs
/// are first resolved to their worst value within each table.
pub fn fcr(frameworks: &[FrameworkResult], granularity: Granularity) -> Result<FcrResult> {
    check_shared(frameworks)?;
    let tables: Vec<ResultTable> = frameworks.iter().map(|f| resolve_failures(&f.table)).collect();
    let base = &tables[0];
    if base.suite().is_empty() {
        return Err(Error::EmptySuite);
    }

    let unit_score = |table: &ResultTable, test: usize, algs: &[usize]| -> f64 {
        let n = table.seeds().len();
        mean(
            algs.iter()
                .flat_map(|&alg| (0..n).map(move |s| table.cell(test, alg, s).value.expect("failures resolved"))),
        )
    };

    let all_algs: Vec<usize> = (0..base.algorithms().len()).collect();
    let mut sums = vec![0_u64; tables.len()];
    let mut units = 0;
    for test in 0..base.suite().len() {
        let direction = base.metric_spec(test).direction;
        let groups: Vec<&[usize]> = match granularity {
            Granularity::PerAlgorithmTest => all_algs.chunks(1).collect(),
            Granularity::PerTest => vec![&all_algs[..]],
        };
        for algs in groups {
            let scores: Vec<f64> = tables.iter().map(|t| unit_score(t, test, algs)).collect();
            let ranked = rank_row(&scores, direction, TiePolicy::MeanOfTied, 0.0)?;
            for (acc, r) in sums.iter_mut().zip(&ranked.ranks) {
                *acc += u64::from(r.half_units());
            }
            units += 1;
        }
    }

    Ok(FcrResult {
        labels: frameworks.iter().map(|f| f.label.clone()).collect(),
        fcr: sums.iter().map(|&h| h as f64 / (2 * units) as f64).collect(),
        rank_sums_half_units: sums,
        units,
        granularity,
    })
}
