//! How the two tie policies and the tie epsilon turn scores into ranks.
//!
//! cargo run --example tie_policies

use rankbench::{rank_row, Direction, TiePolicy};

fn show(label: &str, values: &[f64], direction: Direction, eps: f64) -> rankbench::Result<()> {
    println!("{label}: {values:?} ({} is better, epsilon {eps})", direction.as_str());
    for policy in [TiePolicy::MeanOfTied, TiePolicy::LowestSharedRank] {
        let row = rank_row(values, direction, policy, eps)?;
        let ranks: Vec<String> = row.ranks.iter().map(ToString::to_string).collect();
        println!(
            "  {:<8} ranks [{}], tie groups {:?}",
            policy.as_str(),
            ranks.join(", "),
            row.tie_groups
        );
    }
    Ok(())
}

fn main() -> rankbench::Result<()> {
    show("distinct", &[0.71, 0.64, 0.69], Direction::HigherBetter, 0.0)?;
    // Conductance piles up at exactly zero for trivial clusterings.
    show("conductance", &[0.0, 0.12, 0.0, 0.0, 0.31], Direction::LowerBetter, 0.0)?;
    // 0.700 ~ 0.702 ~ 0.704 chain into one group at epsilon 0.0025 although the ends differ by 0.004.
    show(
        "epsilon chain",
        &[0.700, 0.702, 0.704, 0.650],
        Direction::HigherBetter,
        0.0025,
    )?;
    Ok(())
}
