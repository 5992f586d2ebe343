//! Kendall's W per test, with and without the tie correction, and the
//! resulting randomness coefficient.
//!
//! cargo run --example concordance

use rankbench::{kendall_w_test, kendall_w_tied_test, w_randomness, RankMatrix, TestId, TiePolicy};

fn matrix(dataset: &str, rows: &[Vec<f64>]) -> rankbench::Result<RankMatrix> {
    RankMatrix::from_f64_rows(TestId::new(dataset, "nmi"), TiePolicy::MeanOfTied, rows)
}

fn main() -> rankbench::Result<()> {
    let suite = vec![
        // Every seed agrees.
        matrix("cora", &[vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]])?,
        // One seed swaps the top two.
        matrix(
            "citeseer",
            &[vec![1.0, 2.0, 3.0], vec![2.0, 1.0, 3.0], vec![1.0, 2.0, 3.0]],
        )?,
        // One seed cannot separate the top two.
        matrix(
            "pubmed",
            &[vec![1.5, 1.5, 3.0], vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]],
        )?,
    ];

    for m in &suite {
        let plain = kendall_w_test(m)?;
        let tied = kendall_w_tied_test(m)?;
        println!(
            "{:<14} rank sums {:?}  S {:>5}  W {:.6}  W_t {:.6}  (tie term {})",
            m.test().to_string(),
            plain.rank_sums,
            plain.deviation_sum,
            plain.per_test_w,
            tied.per_test_w,
            tied.tie_correction
        );
    }

    let w = w_randomness(&suite, false)?;
    let wt = w_randomness(&suite, true)?;
    println!("W randomness   {:.6}", w.value);
    println!("W_t randomness {:.6}", wt.value);
    Ok(())
}
