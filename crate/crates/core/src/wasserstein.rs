//! Wasserstein-1 distances between per-algorithm rank distributions and the
//! W_w randomness coefficient.

use log::warn;

use crate::coefficient::{one_minus_mean, Coefficient, CoefficientResult, TestValue};
use crate::error::{Error, Result};
use crate::ranking::{count_ties, Rank, RankMatrix};
use crate::result_model::TestId;

/// Empirical distribution of one algorithm's rank across seeds on one test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankDistribution {
    pub test: TestId,
    pub algorithm: usize,
    samples: Vec<Rank>,
}

impl RankDistribution {
    pub fn new(test: TestId, algorithm: usize, mut samples: Vec<Rank>) -> Self {
        samples.sort_unstable();
        RankDistribution {
            test,
            algorithm,
            samples,
        }
    }

    pub fn from_matrix(matrix: &RankMatrix, algorithm: usize) -> Self {
        Self::new(matrix.test().clone(), algorithm, matrix.column(algorithm))
    }

    /// Samples in ascending order.
    pub fn samples(&self) -> &[Rank] {
        &self.samples
    }

    /// `F(r)`: fraction of samples `<= r`.
    pub fn cdf(&self, r: f64) -> f64 {
        let below = self.samples.partition_point(|s| s.value() <= r);
        below as f64 / self.samples.len() as f64
    }
}

/// Sum of `|sorted1[k] - sorted2[k]|` in half units.
fn matched_gap_half_units(d1: &RankDistribution, d2: &RankDistribution) -> Result<u64> {
    if d1.samples.len() != d2.samples.len() {
        return Err(Error::SampleCountMismatch {
            left: d1.samples.len(),
            right: d2.samples.len(),
        });
    }
    Ok(d1
        .samples
        .iter()
        .zip(&d2.samples)
        .map(|(x, y)| u64::from(x.half_units().abs_diff(y.half_units())))
        .sum())
}

/// `integral |F_1(r) - F_2(r)| dr`. For equal sample counts this is the mean
/// absolute difference between the sorted samples.
pub fn w1_distance(d1: &RankDistribution, d2: &RankDistribution) -> Result<f64> {
    let gap = matched_gap_half_units(d1, d2)?;
    Ok(gap as f64 / (2 * d1.samples.len()) as f64)
}

/// `sum_{v=1..a} v(v-1)/2 = a(a-1)(a+1)/6`, the pairwise distance total when
/// every seed produces the same strict ranking.
pub fn normalizer(a: usize) -> u64 {
    let a = a as u64;
    a * (a - 1) * (a + 1) / 6
}

/// Pairwise W1 total over all algorithm pairs, divided by [`normalizer`].
/// 1 means fully separated rank distributions, 0 means identical ones.
pub fn ww_test(matrix: &RankMatrix) -> Result<f64> {
    let a = matrix.n_algorithms();
    if a < 2 {
        return Err(Error::TooFewAlgorithms(a));
    }
    let n = matrix.n_seeds();
    if n == 0 {
        return Err(Error::NoSeeds);
    }
    let dists: Vec<RankDistribution> = (0..a).map(|i| RankDistribution::from_matrix(matrix, i)).collect();
    let mut total = 0_u64;
    for i in 0..a {
        for j in 0..i {
            total += matched_gap_half_units(&dists[i], &dists[j])?;
        }
    }
    // total / (2n) / normalizer, as one division of exact integers.
    Ok(total as f64 / (2 * n as u64 * normalizer(a)) as f64)
}

/// `1 - mean_t ww_test(t)` over the suite, in the given order.
pub fn ww_randomness(matrices: &[RankMatrix]) -> Result<CoefficientResult> {
    let first = matrices.first().ok_or(Error::EmptySuite)?;
    let mut warnings = Vec::new();
    let mut per_test = Vec::with_capacity(matrices.len());
    for m in matrices {
        let ratio = ww_test(m)?;
        if ratio > 1.0 {
            let msg = format!(
                "{}: normalised Wasserstein ratio {ratio} exceeds 1; ranks are not permutations",
                m.test()
            );
            warn!("{msg}");
            warnings.push(msg);
        }
        per_test.push(TestValue::new(m.test(), ratio));
    }
    Ok(CoefficientResult {
        coefficient: Coefficient::WWasserstein,
        tie_policy: first.policy(),
        value: one_minus_mean(per_test.iter().map(|t| t.value)),
        per_test,
        n_ties: count_ties(matrices),
        warnings,
    })
}
