//! Per-seed rankings of algorithms on each test.
//!
//! Ranks are kept as exact half-integers so that rank sums, and everything
//! derived from them, are bit-stable regardless of summation order.

use std::cmp::Ordering;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::result_model::{Direction, ResultTable, TestId};

/// A rank stored in half units, so `Rank::from_half_units(5)` is 2.5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rank(u32);

impl Rank {
    pub const fn from_half_units(half: u32) -> Self {
        Rank(half)
    }

    pub const fn whole(r: u32) -> Self {
        Rank(2 * r)
    }

    /// Exact conversion from a float that is a multiple of 0.5.
    pub fn try_from_f64(v: f64) -> Option<Self> {
        let half = v * 2.0;
        (half.is_finite() && half >= 0.0 && half.fract() == 0.0 && half <= u32::MAX as f64).then_some(Rank(half as u32))
    }

    pub const fn half_units(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}.5", self.0 / 2)
        }
    }
}

impl Serialize for Rank {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TiePolicy {
    /// Tied block at positions `p..p+t-1` all receive `(2p+t-1)/2`.
    MeanOfTied,
    /// Tied block all receive `p` (competition ranking, "1224").
    LowestSharedRank,
}

impl TiePolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            TiePolicy::MeanOfTied => "mean",
            TiePolicy::LowestSharedRank => "lowest",
        }
    }

    /// Rank in half units for a tied block of `size` starting at 1-based `start`.
    fn block_rank(self, start: usize, size: usize) -> u32 {
        match self {
            TiePolicy::MeanOfTied => (2 * start + size - 1) as u32,
            TiePolicy::LowestSharedRank => (2 * start) as u32,
        }
    }
}

impl fmt::Display for TiePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TiePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mean" => Ok(TiePolicy::MeanOfTied),
            "lowest" => Ok(TiePolicy::LowestSharedRank),
            other => Err(format!("tie policy must be `mean` or `lowest`, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedRow {
    pub ranks: Vec<Rank>,
    /// Sizes of tied groups with at least two members, best group first.
    pub tie_groups: Vec<usize>,
}

/// Ranks one row of scores, best score first.
///
/// Two values tie when they are within `tie_epsilon` of each other, closed
/// transitively: on the sorted line this chains adjacent gaps `<= epsilon`.
pub fn rank_row(values: &[f64], direction: Direction, policy: TiePolicy, tie_epsilon: f64) -> Result<RankedRow> {
    if !(tie_epsilon.is_finite() && tie_epsilon >= 0.0) {
        return Err(Error::InvalidEpsilon(tie_epsilon));
    }
    if values.len() < 2 {
        return Err(Error::TooFewAlgorithms(values.len()));
    }
    if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { index, value });
    }

    let mut order: Vec<usize> = (0..values.len()).collect();
    let better = |x: &usize, y: &usize| -> Ordering {
        let (vx, vy) = (values[*x], values[*y]);
        match direction {
            Direction::HigherBetter => vy.total_cmp(&vx),
            Direction::LowerBetter => vx.total_cmp(&vy),
        }
    };
    order.sort_by(better);

    let mut ranks = vec![Rank(0); values.len()];
    let mut tie_groups = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && (values[order[end]] - values[order[end - 1]]).abs() <= tie_epsilon {
            end += 1;
        }
        let size = end - start;
        let rank = Rank(policy.block_rank(start + 1, size));
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        if size >= 2 {
            tie_groups.push(size);
        }
        start = end;
    }
    Ok(RankedRow { ranks, tie_groups })
}

/// Tie-group sizes of a rank row, after checking that the row is what
/// `policy` produces for some ordering of `1..=a`.
fn validate_row(row: &[Rank], policy: TiePolicy) -> Result<Vec<usize>> {
    let mut sorted = row.to_vec();
    sorted.sort_unstable();
    let mut groups = Vec::new();
    let mut start = 0;
    while start < sorted.len() {
        let end = start + sorted[start..].iter().take_while(|r| **r == sorted[start]).count();
        let size = end - start;
        let expected = Rank(policy.block_rank(start + 1, size));
        if sorted[start] != expected {
            return Err(Error::InvalidRankRow(format!(
                "{} rank {} at position {} should be {} under `{policy}` ties",
                if size > 1 { "tied" } else { "untied" },
                sorted[start],
                start + 1,
                expected
            )));
        }
        if size >= 2 {
            groups.push(size);
        }
        start = end;
    }
    Ok(groups)
}

/// Ranks of every algorithm on one test under every seed (seed-major).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankMatrix {
    test: TestId,
    policy: TiePolicy,
    n_algorithms: usize,
    ranks: Vec<Rank>,
    tie_groups: Vec<Vec<usize>>,
}

impl RankMatrix {
    /// Builds a matrix from explicit rank rows, one per seed. Every row must
    /// be a valid ranking of the same number of algorithms under `policy`.
    pub fn from_rows(test: TestId, policy: TiePolicy, rows: Vec<Vec<Rank>>) -> Result<Self> {
        let n_algorithms = rows.first().map_or(0, Vec::len);
        if rows.is_empty() {
            return Err(Error::NoSeeds);
        }
        if n_algorithms < 2 {
            return Err(Error::TooFewAlgorithms(n_algorithms));
        }
        let mut ranks = Vec::with_capacity(rows.len() * n_algorithms);
        let mut tie_groups = Vec::with_capacity(rows.len());
        for row in rows {
            if row.len() != n_algorithms {
                return Err(Error::InvalidRankRow(format!(
                    "row has {} ranks, expected {n_algorithms}",
                    row.len()
                )));
            }
            tie_groups.push(validate_row(&row, policy)?);
            ranks.extend(row);
        }
        Ok(RankMatrix {
            test,
            policy,
            n_algorithms,
            ranks,
            tie_groups,
        })
    }

    /// Convenience over [`RankMatrix::from_rows`] for rows written as floats.
    pub fn from_f64_rows(test: TestId, policy: TiePolicy, rows: &[Vec<f64>]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&v| {
                        Rank::try_from_f64(v)
                            .ok_or_else(|| Error::InvalidRankRow(format!("{v} is not a multiple of 0.5")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(test, policy, rows)
    }

    pub fn test(&self) -> &TestId {
        &self.test
    }

    pub fn policy(&self) -> TiePolicy {
        self.policy
    }

    /// Number of algorithms, `a`.
    pub fn n_algorithms(&self) -> usize {
        self.n_algorithms
    }

    /// Number of seeds, `n`.
    pub fn n_seeds(&self) -> usize {
        self.tie_groups.len()
    }

    pub fn row(&self, seed: usize) -> &[Rank] {
        &self.ranks[seed * self.n_algorithms..(seed + 1) * self.n_algorithms]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Rank]> {
        self.ranks.chunks(self.n_algorithms)
    }

    pub fn rank(&self, seed: usize, algorithm: usize) -> Rank {
        self.ranks[seed * self.n_algorithms + algorithm]
    }

    /// One algorithm's rank under every seed.
    pub fn column(&self, algorithm: usize) -> Vec<Rank> {
        self.rows().map(|r| r[algorithm]).collect()
    }

    /// Tied-group sizes (each >= 2) per seed.
    pub fn tie_groups(&self) -> &[Vec<usize>] {
        &self.tie_groups
    }

    /// Number of tied groups summed over seeds.
    pub fn n_tie_groups(&self) -> usize {
        self.tie_groups.iter().map(Vec::len).sum()
    }
}

/// One rank matrix per test, in suite order. Expects failures to have been
/// resolved to values already.
pub fn build_rank_matrices(table: &ResultTable, policy: TiePolicy, tie_epsilon: f64) -> Result<Vec<RankMatrix>> {
    let a = table.algorithms().len();
    let mut out = Vec::with_capacity(table.suite().len());
    for (t, test) in table.suite().iter().enumerate() {
        let direction = table.metric_spec(t).direction;
        let mut rows = Vec::with_capacity(table.seeds().len());
        for (s, &seed) in table.seeds().iter().enumerate() {
            let values = (0..a)
                .map(|alg| {
                    table.cell(t, alg, s).value.ok_or_else(|| Error::UnresolvedFailure {
                        algorithm: table.algorithms()[alg].clone(),
                        dataset: test.dataset.clone(),
                        metric: test.metric.clone(),
                        seed,
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            let ranked = rank_row(&values, direction, policy, tie_epsilon).map_err(|e| Error::RankContext {
                dataset: test.dataset.clone(),
                metric: test.metric.clone(),
                seed,
                source: Box::new(e),
            })?;
            rows.push(ranked);
        }
        out.push(RankMatrix {
            test: test.clone(),
            policy,
            n_algorithms: a,
            tie_groups: rows.iter().map(|r| r.tie_groups.clone()).collect(),
            ranks: rows.into_iter().flat_map(|r| r.ranks).collect(),
        });
    }
    Ok(out)
}

/// Total number of tied groups across every test and seed.
pub fn count_ties(matrices: &[RankMatrix]) -> usize {
    matrices.iter().map(RankMatrix::n_tie_groups).sum()
}

/// Debug export, columns `dataset,metric,seed,algorithm,rank`.
pub fn write_rank_csv<W: Write>(table: &ResultTable, matrices: &[RankMatrix], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["dataset", "metric", "seed", "algorithm", "rank"])?;
    for m in matrices {
        for (s, seed) in table.seeds().iter().enumerate() {
            for (alg, name) in table.algorithms().iter().enumerate() {
                w.write_record([
                    m.test.dataset.as_str(),
                    m.test.metric.as_str(),
                    &seed.to_string(),
                    name.as_str(),
                    &m.rank(s, alg).to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
