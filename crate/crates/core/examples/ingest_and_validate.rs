//! Load a result table, inspect the grid and see what failure resolution does.
//!
//! cargo run --example ingest_and_validate

use std::fs;

use rankbench::result_model::Cell;
use rankbench::{ingest, ingest_with, resolve_failures, IngestOptions, InputFormat, MetricRegistry};

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data");

fn main() -> rankbench::Result<()> {
    let registry = MetricRegistry::parse(&fs::read_to_string(format!("{DATA}/registry.txt"))?)?;
    let csv = fs::read(format!("{DATA}/results.csv"))?;
    let table = ingest(csv.as_slice(), InputFormat::Csv, registry.clone())?;

    println!("algorithms: {:?}", table.algorithms());
    println!("seeds:      {:?}", table.seeds());
    for (t, test) in table.suite().iter().enumerate() {
        let spec = table.metric_spec(t);
        println!("test {test}: {} is better", spec.direction.as_str());
    }

    // Failed runs get the worst value of their metric before ranking.
    let resolved = resolve_failures(&table);
    for (t, test) in table.suite().iter().enumerate() {
        for a in 0..table.algorithms().len() {
            for s in 0..table.seeds().len() {
                if let Cell {
                    value: None, status, ..
                } = table.cell(t, a, s)
                {
                    let after = resolved.cell(t, a, s).value.unwrap();
                    println!(
                        "{test} {} seed {}: {} resolved to {after}",
                        table.algorithms()[a],
                        table.seeds()[s],
                        status.as_str()
                    );
                }
            }
        }
    }

    // A grid with a hole is rejected with the missing cell named...
    let holed: String = String::from_utf8_lossy(&csv)
        .lines()
        .filter(|l| !l.starts_with("kmeans,cora,nmi,1,"))
        .map(|l| format!("{l}\n"))
        .collect();
    match ingest(holed.as_bytes(), InputFormat::Csv, registry.clone()) {
        Ok(_) => unreachable!("grid has a hole"),
        Err(e) => println!("rejected: {e}"),
    }

    // ...unless incomplete tests are dropped explicitly.
    let kept = ingest_with(
        holed.as_bytes(),
        InputFormat::Csv,
        registry,
        IngestOptions { drop_incomplete: true },
    )?;
    let dropped: Vec<String> = kept.dropped.iter().map(ToString::to_string).collect();
    println!(
        "dropped [{}], kept {} tests",
        dropped.join(", "),
        kept.table.suite().len()
    );
    Ok(())
}
