//! Generate synthetic suites and see each knob move the coefficients.
//!
//! cargo run --example synthetic_suite

use rankbench::{
    build_rank_matrices, count_ties, generate, resolve_failures, w_randomness, ww_randomness, SynthConfig, TiePolicy,
};

fn row(label: &str, cfg: &SynthConfig) -> rankbench::Result<()> {
    let table = resolve_failures(&generate(cfg)?);
    let m = build_rank_matrices(&table, TiePolicy::MeanOfTied, 0.0)?;
    println!(
        "{label:<22} W {:.4}  W_t {:.4}  W_w {:.4}  tie groups {}",
        w_randomness(&m, false)?.value,
        w_randomness(&m, true)?.value,
        ww_randomness(&m)?.value,
        count_ties(&m)
    );
    Ok(())
}

fn main() -> rankbench::Result<()> {
    let base = SynthConfig::default();
    println!(
        "{} algorithms, {} datasets x {} metrics, {} seeds\n",
        base.n_algorithms, base.n_datasets, base.n_metrics, base.n_seeds
    );
    row(
        "no noise",
        &SynthConfig {
            noise_scale: 0.0,
            ..base.clone()
        },
    )?;
    for noise in [0.25, 0.5, 1.0, 2.0] {
        row(
            &format!("noise {noise}"),
            &SynthConfig {
                noise_scale: noise,
                ..base.clone()
            },
        )?;
    }
    row(
        "no quality gap",
        &SynthConfig {
            quality_gap: 0.0,
            ..base.clone()
        },
    )?;
    row(
        "ties (p = 0.8)",
        &SynthConfig {
            tie_prob: 0.8,
            ..base.clone()
        },
    )?;
    row(
        "failures (p = 0.2)",
        &SynthConfig {
            fail_prob: 0.2,
            ..base.clone()
        },
    )?;

    // The generated table is an ordinary result table.
    let small = generate(&SynthConfig {
        n_algorithms: 3,
        n_datasets: 1,
        n_metrics: 1,
        n_seeds: 2,
        ..base
    })?;
    small.write_csv(std::io::stdout())?;
    Ok(())
}
