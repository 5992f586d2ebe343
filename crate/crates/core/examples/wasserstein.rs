//! Rank distributions and the Wasserstein randomness coefficient.
//!
//! cargo run --example wasserstein

use rankbench::{normalizer, w1_distance, ww_randomness, ww_test, RankDistribution, RankMatrix, TestId, TiePolicy};

fn main() -> rankbench::Result<()> {
    // Four seeds, three algorithms. Algorithm 0 always wins; 1 and 2 trade places.
    let rows = vec![
        vec![1.0, 2.0, 3.0],
        vec![1.0, 3.0, 2.0],
        vec![1.0, 2.0, 3.0],
        vec![1.0, 3.0, 2.0],
    ];
    let m = RankMatrix::from_f64_rows(TestId::new("cora", "modularity"), TiePolicy::MeanOfTied, &rows)?;

    let dists: Vec<RankDistribution> = (0..3).map(|a| RankDistribution::from_matrix(&m, a)).collect();
    for (a, d) in dists.iter().enumerate() {
        let ranks: Vec<String> = d.samples().iter().map(ToString::to_string).collect();
        println!(
            "algorithm {a}: ranks [{}], P(rank <= 2) = {}",
            ranks.join(", "),
            d.cdf(2.0)
        );
    }
    for i in 0..3 {
        for j in 0..i {
            println!("W1({i}, {j}) = {}", w1_distance(&dists[i], &dists[j])?);
        }
    }

    // A perfectly stable strict ranking of a algorithms has pairwise total a(a-1)(a+1)/6.
    println!("normalizer(3) = {}", normalizer(3));
    println!("normalised separation = {}", ww_test(&m)?);
    println!("W_w randomness = {}", ww_randomness(std::slice::from_ref(&m))?.value);
    Ok(())
}
