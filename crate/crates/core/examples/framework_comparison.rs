//! Framework Comparison Rank: default against tuned hyperparameters on the
//! same grid.
//!
//! cargo run --example framework_comparison

use std::fs;

use rankbench::{fcr, ingest, FrameworkResult, Granularity, InputFormat, MetricRegistry, ResultTable};

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data");

fn load(name: &str, registry: &MetricRegistry) -> rankbench::Result<ResultTable> {
    ingest(
        fs::read(format!("{DATA}/{name}"))?.as_slice(),
        InputFormat::Csv,
        registry.clone(),
    )
}

fn main() -> rankbench::Result<()> {
    let registry = MetricRegistry::parse(&fs::read_to_string(format!("{DATA}/registry.txt"))?)?;
    let frameworks = [
        FrameworkResult::new("default", load("results.csv", &registry)?),
        FrameworkResult::new("tuned", load("results_tuned.csv", &registry)?),
    ];

    for granularity in [Granularity::PerAlgorithmTest, Granularity::PerTest] {
        let r = fcr(&frameworks, granularity)?;
        println!("{} ({} units)", granularity.as_str(), r.units);
        for (label, v) in r.labels.iter().zip(&r.fcr) {
            println!("  {label:<8} {v:.4}");
        }
    }
    Ok(())
}
