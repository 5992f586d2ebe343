//! Kendall's coefficient of concordance per test, and the W / W_t randomness
//! coefficients built from it.
//!
//! All intermediate sums are exact integers over half-unit ranks; the only
//! rounding is the final division producing each per-test W.

use log::warn;
use serde::Serialize;

use crate::coefficient::{one_minus_mean, Coefficient, CoefficientResult, TestValue};
use crate::error::{Error, Result};
use crate::ranking::{count_ties, RankMatrix, TiePolicy};
use crate::result_model::TestId;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcordanceStats {
    pub test: TestId,
    /// `R_i`, each algorithm's rank summed over seeds.
    pub rank_sums: Vec<f64>,
    /// `S = sum_i (R_i - n(a+1)/2)^2`.
    pub deviation_sum: f64,
    /// `sum_j sum_i (t_i^3 - t_i)` over every seed's tied groups.
    pub tie_correction: u64,
    pub per_test_w: f64,
    /// Set when the tie-corrected denominator vanished and W was defined as 1.
    pub degenerate: bool,
}

struct Sums {
    n: i128,
    a: i128,
    /// Rank sums in half units.
    doubled: Vec<i128>,
    tie_correction: i128,
}

fn sums(matrix: &RankMatrix) -> Result<Sums> {
    let a = matrix.n_algorithms();
    if a < 2 {
        return Err(Error::TooFewAlgorithms(a));
    }
    if matrix.n_seeds() == 0 {
        return Err(Error::NoSeeds);
    }
    let mut doubled = vec![0_i128; a];
    for row in matrix.rows() {
        for (acc, r) in doubled.iter_mut().zip(row) {
            *acc += i128::from(r.half_units());
        }
    }
    let tie_correction = matrix
        .tie_groups()
        .iter()
        .flatten()
        .map(|&t| {
            let t = t as i128;
            t * t * t - t
        })
        .sum();
    Ok(Sums {
        n: matrix.n_seeds() as i128,
        a: a as i128,
        doubled,
        tie_correction,
    })
}

impl Sums {
    /// `4S`, exact.
    fn four_s(&self) -> i128 {
        let centre = self.n * (self.a + 1);
        self.doubled.iter().map(|d| (d - centre) * (d - centre)).sum()
    }

    fn stats(&self, test: &TestId, per_test_w: f64, degenerate: bool) -> ConcordanceStats {
        ConcordanceStats {
            test: test.clone(),
            rank_sums: self.doubled.iter().map(|&d| d as f64 / 2.0).collect(),
            deviation_sum: self.four_s() as f64 / 4.0,
            tie_correction: self.tie_correction as u64,
            per_test_w,
            degenerate,
        }
    }
}

/// `W = 12S / (n^2 (a^3 - a))` for one test.
pub fn kendall_w_test(matrix: &RankMatrix) -> Result<ConcordanceStats> {
    let s = sums(matrix)?;
    let numerator = 3 * s.four_s();
    let denominator = s.n * s.n * (s.a * s.a * s.a - s.a);
    Ok(s.stats(matrix.test(), numerator as f64 / denominator as f64, false))
}

/// Tie-corrected W for one test:
///
/// ```text
/// (12 sum R_i^2 - 3 n^2 a (a+1)^2) / (n^2 a (a^2-1) - n sum_j sum_i (t_i^3 - t_i))
/// ```
///
/// When every seed ties all algorithms together both sides vanish; W is then 1
/// (all seeds agree) and `degenerate` is set.
pub fn kendall_w_tied_test(matrix: &RankMatrix) -> Result<ConcordanceStats> {
    if matrix.policy() != TiePolicy::MeanOfTied {
        return Err(Error::RequiresMeanRanks);
    }
    let s = sums(matrix)?;
    // 12 * sum (D_i / 2)^2 = 3 * sum D_i^2
    let sum_sq: i128 = s.doubled.iter().map(|d| d * d).sum();
    let numerator = 3 * sum_sq - 3 * s.n * s.n * s.a * (s.a + 1) * (s.a + 1);
    let denominator = s.n * s.n * s.a * (s.a * s.a - 1) - s.n * s.tie_correction;
    if denominator == 0 {
        return Ok(s.stats(matrix.test(), 1.0, true));
    }
    Ok(s.stats(matrix.test(), numerator as f64 / denominator as f64, false))
}

fn common_policy(matrices: &[RankMatrix]) -> Result<TiePolicy> {
    let first = matrices.first().ok_or(Error::EmptySuite)?.policy();
    if matrices.iter().any(|m| m.policy() != first) {
        return Err(Error::InvalidArgument("rank matrices mix tie policies".into()));
    }
    Ok(first)
}

/// `1 - mean_t W_t` over the suite, in the given (TestId) order. With
/// `tied` the tie-corrected per-test W is used.
pub fn w_randomness(matrices: &[RankMatrix], tied: bool) -> Result<CoefficientResult> {
    let policy = common_policy(matrices)?;
    let mut warnings = Vec::new();
    let mut per_test = Vec::with_capacity(matrices.len());
    for m in matrices {
        let stats = if tied {
            kendall_w_tied_test(m)?
        } else {
            kendall_w_test(m)?
        };
        if stats.degenerate {
            let msg = format!(
                "{}: every seed ties all algorithms; tie-corrected W taken as 1",
                m.test()
            );
            warn!("{msg}");
            warnings.push(msg);
        }
        per_test.push(TestValue::new(m.test(), stats.per_test_w));
    }
    if !tied && policy == TiePolicy::LowestSharedRank && matrices.iter().any(|m| m.n_tie_groups() > 0) {
        let msg = "lowest-shared-rank ties do not conserve rank sums; per-test W may fall outside [0, 1]".to_string();
        warn!("{msg}");
        warnings.push(msg);
    }
    Ok(CoefficientResult {
        coefficient: if tied { Coefficient::WTied } else { Coefficient::W },
        tie_policy: policy,
        value: one_minus_mean(per_test.iter().map(|t| t.value)),
        per_test,
        n_ties: count_ties(matrices),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn matrix(rows: &[Vec<f64>]) -> RankMatrix {
        RankMatrix::from_f64_rows(TestId::new("d", "m"), TiePolicy::MeanOfTied, rows).unwrap()
    }

    /// S from its literal definition: deviations of each rank sum from the
    /// observed mean rank sum.
    fn oracle_w(rows: &[Vec<f64>]) -> f64 {
        let n = rows.len() as f64;
        let a = rows[0].len();
        let sums: Vec<f64> = (0..a).map(|i| rows.iter().map(|r| r[i]).sum()).collect();
        let mean = sums.iter().sum::<f64>() / a as f64;
        let s: f64 = sums.iter().map(|r| (r - mean).powi(2)).sum();
        let a = a as f64;
        12.0 * s / (n * n * (a * a * a - a))
    }

    #[test]
    fn perfect_concordance() {
        let st = kendall_w_test(&matrix(&vec![vec![1.0, 2.0, 3.0]; 3])).unwrap();
        assert_eq!(st.rank_sums, vec![3.0, 6.0, 9.0]);
        assert_eq!(st.deviation_sum, 18.0);
        assert_eq!(st.per_test_w, 1.0);
    }

    #[test]
    fn complete_disagreement() {
        let st = kendall_w_test(&matrix(&[vec![1.0, 2.0], vec![2.0, 1.0]])).unwrap();
        assert_eq!(st.rank_sums, vec![3.0, 3.0]);
        assert_eq!(st.deviation_sum, 0.0);
        assert_eq!(st.per_test_w, 0.0);
    }

    #[test]
    fn partial_agreement() {
        let rows = [vec![1.0, 2.0, 3.0], vec![2.0, 1.0, 3.0], vec![1.0, 2.0, 3.0]];
        let st = kendall_w_test(&matrix(&rows)).unwrap();
        assert_eq!(st.rank_sums, vec![4.0, 5.0, 9.0]);
        assert_eq!(st.deviation_sum, 14.0);
        assert!((st.per_test_w - 168.0 / 216.0).abs() < 1e-12);
        assert!((st.per_test_w - oracle_w(&rows)).abs() < 1e-12);
    }

    #[test]
    fn tie_corrected_fixture() {
        let rows = [vec![1.5, 1.5, 3.0], vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]];
        let st = kendall_w_tied_test(&matrix(&rows)).unwrap();
        assert_eq!(st.rank_sums, vec![3.5, 5.5, 9.0]);
        assert_eq!(st.tie_correction, 6);
        assert!((st.per_test_w - 186.0 / 198.0).abs() < 1e-12);
    }

    #[test]
    fn fully_tied_rows_use_convention() {
        let st = kendall_w_tied_test(&matrix(&vec![vec![2.0, 2.0, 2.0]; 4])).unwrap();
        assert!(st.degenerate);
        assert_eq!(st.per_test_w, 1.0);
        let r = w_randomness(&[matrix(&vec![vec![2.0, 2.0, 2.0]; 4])], true).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn tied_rejects_lowest_ranks() {
        let m = RankMatrix::from_f64_rows(
            TestId::new("d", "m"),
            TiePolicy::LowestSharedRank,
            &[vec![1.0, 1.0, 3.0]],
        )
        .unwrap();
        assert!(matches!(kendall_w_tied_test(&m), Err(Error::RequiresMeanRanks)));
        let r = w_randomness(&[m], false).unwrap();
        assert_eq!(r.tie_policy, TiePolicy::LowestSharedRank);
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn randomness_of_two_tests() {
        let a = matrix(&vec![vec![1.0, 2.0, 3.0]; 3]);
        let b = matrix(&[vec![1.0, 2.0, 3.0], vec![2.0, 1.0, 3.0], vec![1.0, 2.0, 3.0]]);
        let r = w_randomness(&[a.clone(), b], false).unwrap();
        assert!((r.value - (1.0 - (1.0 + 168.0 / 216.0) / 2.0)).abs() < 1e-12);
        assert!((r.value - 0.111111).abs() < 1e-6);
        assert_eq!(w_randomness(&[a.clone(), a], false).unwrap().value, 0.0);
        assert!(matches!(w_randomness(&[], false), Err(Error::EmptySuite)));
    }

    fn perm_rows(a: usize, n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        let row = Just((1..=a).map(|r| r as f64).collect::<Vec<_>>()).prop_shuffle();
        prop::collection::vec(row, n)
    }

    fn any_perm_matrix() -> impl Strategy<Value = Vec<Vec<f64>>> {
        (2usize..=5, 1usize..=4).prop_flat_map(|(a, n)| perm_rows(a, n))
    }

    proptest! {
        #[test]
        fn matches_oracle(rows in any_perm_matrix()) {
            let st = kendall_w_test(&matrix(&rows)).unwrap();
            prop_assert!((st.per_test_w - oracle_w(&rows)).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&st.per_test_w));
        }

        #[test]
        fn tied_equals_plain_without_ties(rows in any_perm_matrix()) {
            let m = matrix(&rows);
            prop_assert_eq!(kendall_w_tied_test(&m).unwrap().per_test_w, kendall_w_test(&m).unwrap().per_test_w);
        }

        #[test]
        fn single_seed_is_fully_concordant(rows in (2usize..=8).prop_flat_map(|a| perm_rows(a, 1))) {
            prop_assert_eq!(w_randomness(&[matrix(&rows)], false).unwrap().value, 0.0);
        }

        #[test]
        fn seed_and_algorithm_relabelling(rows in any_perm_matrix(), rot in 0usize..5) {
            let base = matrix(&rows);
            let mut reversed = rows.clone();
            reversed.reverse();
            let a = rows[0].len();
            let rotated: Vec<Vec<f64>> = rows.iter().map(|r| (0..a).map(|i| r[(i + rot) % a]).collect()).collect();
            for other in [matrix(&reversed), matrix(&rotated)] {
                prop_assert_eq!(kendall_w_test(&other).unwrap().per_test_w, kendall_w_test(&base).unwrap().per_test_w);
                prop_assert_eq!(kendall_w_tied_test(&other).unwrap().per_test_w, kendall_w_tied_test(&base).unwrap().per_test_w);
            }
        }

        #[test]
        fn tied_w_in_unit_interval(values in prop::collection::vec(prop::collection::vec(0i32..3, 4), 1..5)) {
            use crate::ranking::rank_row;
            use crate::result_model::Direction;
            let ranks = values.iter().map(|row| {
                let v: Vec<f64> = row.iter().map(|&x| f64::from(x)).collect();
                rank_row(&v, Direction::HigherBetter, TiePolicy::MeanOfTied, 0.0).unwrap().ranks
            }).collect();
            let m = RankMatrix::from_rows(TestId::new("d", "m"), TiePolicy::MeanOfTied, ranks).unwrap();
            let st = kendall_w_tied_test(&m).unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&st.per_test_w), "{}", st.per_test_w);
            let plain = kendall_w_test(&m).unwrap();
            prop_assert!((0.0..=1.0).contains(&plain.per_test_w));
        }
    }
}
