//! Subsample the suite at every size and watch the coefficients settle.
//! Writes the summary CSV and an SVG chart to the directory given as the
//! first argument (default: the system temp directory).
//!
//! cargo run --example convergence_study -- out/

use std::path::PathBuf;

use rankbench::plot::convergence_svg;
use rankbench::{
    build_rank_matrices, generate, resolve_failures, subsample_convergence, Coefficient, SynthConfig, TiePolicy,
};

fn main() -> rankbench::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    std::fs::create_dir_all(&out)?;

    let cfg = SynthConfig {
        tie_prob: 0.5,
        fail_prob: 0.05,
        rng_seed: 7,
        ..SynthConfig::default()
    };
    let table = resolve_failures(&generate(&cfg)?);
    let matrices = build_rank_matrices(&table, TiePolicy::MeanOfTied, 0.0)?;
    let sizes: Vec<usize> = (1..=matrices.len()).collect();
    let report = subsample_convergence(&matrices, &Coefficient::ALL, &sizes, 10, 2024)?;

    println!("{:>4}  {:>18}  {:>18}  {:>18}", "k", "w", "w_tied", "w_wasserstein");
    for k in [1, 2, 5, 11, 22, 44] {
        let col = |c| {
            let cell = report.cell(k, c).unwrap();
            format!("{:.4} +/- {:.4}", cell.mean, cell.std)
        };
        println!(
            "{k:>4}  {:>18}  {:>18}  {:>18}",
            col(Coefficient::W),
            col(Coefficient::WTied),
            col(Coefficient::WWasserstein)
        );
    }

    let summary = out.join("convergence_summary.csv");
    report.write_summary_csv(std::fs::File::create(&summary)?)?;
    let svg = out.join("convergence.svg");
    std::fs::write(&svg, convergence_svg(&report))?;
    println!("wrote {} and {}", summary.display(), svg.display());
    Ok(())
}
