//! Convergence of the randomness coefficients under subsampling of the test
//! suite: for each subsample size `k`, draw `k` distinct tests `repeats`
//! times and recompute every coefficient on the draw.

use std::collections::BTreeSet;
use std::io::Write;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::coefficient::{one_minus_mean, Coefficient};
use crate::concordance::w_randomness;
use crate::error::{Error, Result};
use crate::ranking::RankMatrix;
use crate::wasserstein::ww_randomness;

/// Identifies how subsample draws are generated, recorded in every report.
pub const RNG_ALGORITHM: &str =
    "chacha8; seed_from_u64(rng_seed); stream = size << 32 | repeat; rand::seq::index::sample";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceCell {
    pub size: usize,
    pub coefficient: Coefficient,
    /// One value per repeat, in repeat order.
    pub values: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single repeat.
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FullSuiteValue {
    pub coefficient: Coefficient,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub n_tests: usize,
    pub sizes: Vec<usize>,
    pub repeats: usize,
    pub coefficients: Vec<Coefficient>,
    /// Size-major, then coefficient order.
    pub cells: Vec<ConvergenceCell>,
    pub full_suite: Vec<FullSuiteValue>,
    pub rng_seed: u64,
    pub rng_algorithm: &'static str,
    /// SHA-256 of the rank matrices the study ran on.
    pub provenance: String,
}

impl ConvergenceReport {
    pub fn cell(&self, size: usize, coefficient: Coefficient) -> Option<&ConvergenceCell> {
        self.cells
            .iter()
            .find(|c| c.size == size && c.coefficient == coefficient)
    }

    pub fn full_suite_value(&self, coefficient: Coefficient) -> Option<f64> {
        self.full_suite
            .iter()
            .find(|f| f.coefficient == coefficient)
            .map(|f| f.value)
    }

    /// Plot data, columns `size,repeat,coefficient,value`.
    pub fn write_plot_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["size", "repeat", "coefficient", "value"])?;
        for cell in &self.cells {
            for (repeat, v) in cell.values.iter().enumerate() {
                w.write_record([
                    cell.size.to_string(),
                    repeat.to_string(),
                    cell.coefficient.to_string(),
                    v.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Summary, columns `size,coefficient,mean,std`.
    pub fn write_summary_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["size", "coefficient", "mean", "std"])?;
        for cell in &self.cells {
            w.write_record([
                cell.size.to_string(),
                cell.coefficient.to_string(),
                cell.mean.to_string(),
                cell.std.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Content digest of a collection of rank matrices.
pub fn matrices_digest(matrices: &[RankMatrix]) -> String {
    let mut h = Sha256::new();
    for m in matrices {
        h.update(format!("{}\t{}\t{}\n", m.test().dataset, m.test().metric, m.policy()));
        for row in m.rows() {
            let line: Vec<String> = row.iter().map(|r| r.half_units().to_string()).collect();
            h.update(line.join(","));
            h.update("\n");
        }
    }
    hex::encode(h.finalize())
}

fn per_test_values(matrices: &[RankMatrix], coefficient: Coefficient) -> Result<(f64, Vec<f64>)> {
    let result = match coefficient {
        Coefficient::W => w_randomness(matrices, false)?,
        Coefficient::WTied => w_randomness(matrices, true)?,
        Coefficient::WWasserstein => ww_randomness(matrices)?,
    };
    Ok((result.value, result.per_test.into_iter().map(|t| t.value).collect()))
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.windows(2).all(|w| w[0].to_bits() == w[1].to_bits()) {
        return (values[0], 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Indices of one subsample draw, ascending. Each (size, repeat) pair reads
/// its own ChaCha stream, so draws do not depend on evaluation order.
pub fn draw_subsample(rng_seed: u64, n_tests: usize, size: usize, repeat: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rng.set_stream(((size as u64) << 32) | repeat as u64);
    let mut picked = index::sample(&mut rng, n_tests, size).into_vec();
    picked.sort_unstable();
    picked
}

pub fn subsample_convergence(
    matrices: &[RankMatrix],
    coefficients: &[Coefficient],
    sizes: &[usize],
    repeats: usize,
    rng_seed: u64,
) -> Result<ConvergenceReport> {
    let n_tests = matrices.len();
    if n_tests == 0 {
        return Err(Error::EmptySuite);
    }
    let coefficients: Vec<Coefficient> = coefficients
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if coefficients.is_empty() {
        return Err(Error::NoCoefficients);
    }
    if repeats == 0 {
        return Err(Error::NoRepeats);
    }
    if let Some(&size) = sizes.iter().find(|&&k| k == 0 || k > n_tests) {
        return Err(Error::SizeOutOfRange { size, max: n_tests });
    }

    let mut full_suite = Vec::with_capacity(coefficients.len());
    let mut per_test = Vec::with_capacity(coefficients.len());
    for &c in &coefficients {
        let (value, values) = per_test_values(matrices, c)?;
        full_suite.push(FullSuiteValue { coefficient: c, value });
        per_test.push(values);
    }

    let mut cells = Vec::with_capacity(sizes.len() * coefficients.len());
    for &size in sizes {
        let draws: Vec<Vec<usize>> = (0..repeats)
            .map(|r| draw_subsample(rng_seed, n_tests, size, r))
            .collect();
        for (ci, &coefficient) in coefficients.iter().enumerate() {
            let values: Vec<f64> = draws
                .iter()
                .map(|d| one_minus_mean(d.iter().map(|&t| per_test[ci][t])))
                .collect();
            let (mean, std) = mean_std(&values);
            cells.push(ConvergenceCell {
                size,
                coefficient,
                values,
                mean,
                std,
            });
        }
    }

    Ok(ConvergenceReport {
        n_tests,
        sizes: sizes.to_vec(),
        repeats,
        coefficients,
        cells,
        full_suite,
        rng_seed,
        rng_algorithm: RNG_ALGORITHM,
        provenance: matrices_digest(matrices),
    })
}
