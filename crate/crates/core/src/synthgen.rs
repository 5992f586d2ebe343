//! Synthetic benchmark results with tunable seed noise, ties and failures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::result_model::{Direction, MetricRegistry, MetricSpec, ResultRecord, ResultTable, Status};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_algorithms: usize,
    pub n_datasets: usize,
    pub n_metrics: usize,
    pub n_seeds: usize,
    /// Gap between adjacent algorithms' base scores.
    pub quality_gap: f64,
    /// Per-seed noise is uniform on `[-noise_scale, noise_scale]`.
    pub noise_scale: f64,
    /// Probability a score is snapped onto a coarse shared grid.
    pub tie_prob: f64,
    /// Probability a record becomes an out-of-memory failure.
    pub fail_prob: f64,
    pub rng_seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_algorithms: 10,
            n_datasets: 11,
            n_metrics: 4,
            n_seeds: 10,
            quality_gap: 0.5,
            noise_scale: 0.5,
            tie_prob: 0.0,
            fail_prob: 0.0,
            rng_seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.n_algorithms < 2 {
            return bad(format!("n_algorithms must be >= 2, got {}", self.n_algorithms));
        }
        for (name, v) in [
            ("n_datasets", self.n_datasets),
            ("n_metrics", self.n_metrics),
            ("n_seeds", self.n_seeds),
        ] {
            if v == 0 {
                return bad(format!("{name} must be >= 1"));
            }
        }
        for (name, v) in [("quality_gap", self.quality_gap), ("noise_scale", self.noise_scale)] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be finite and >= 0, got {v}"));
            }
        }
        for (name, p) in [("tie_prob", self.tie_prob), ("fail_prob", self.fail_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must be in [0, 1], got {p}"));
            }
        }
        Ok(())
    }

    pub fn metric_name(i: usize) -> String {
        format!("metric{i}")
    }

    /// Even-numbered metrics are higher-is-better, odd ones lower-is-better.
    pub fn registry(&self) -> MetricRegistry {
        let mut r = MetricRegistry::new();
        for m in 0..self.n_metrics {
            let dir = if m % 2 == 0 {
                Direction::HigherBetter
            } else {
                Direction::LowerBetter
            };
            r.insert(MetricSpec::new(Self::metric_name(m), dir))
                .expect("metric names are unique");
        }
        r
    }
}

/// Draws a complete result grid. Algorithm `alg00` has the highest base score.
///
/// Random draws happen in (dataset, metric, algorithm, seed) order with a
/// fixed number of draws per record, so the output depends only on the config.
pub fn generate(config: &SynthConfig) -> Result<ResultTable> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let a = config.n_algorithms;
    let registry = config.registry();

    let lo = -config.noise_scale;
    let hi = (a - 1) as f64 * config.quality_gap + config.noise_scale;
    let step = (hi - lo) / 4.0;

    let mut records = Vec::with_capacity(a * config.n_datasets * config.n_metrics * config.n_seeds);
    for d in 0..config.n_datasets {
        for m in 0..config.n_metrics {
            let lower_better = m % 2 == 1;
            for alg in 0..a {
                let base = (a - 1 - alg) as f64 * config.quality_gap;
                for seed in 0..config.n_seeds {
                    let u: f64 = rng.random();
                    let snap: f64 = rng.random();
                    let fail: f64 = rng.random();

                    let mut score = base + config.noise_scale * (2.0 * u - 1.0);
                    if snap < config.tie_prob && step > 0.0 {
                        score = lo + ((score - lo) / step).round() * step;
                    }
                    let value = if lower_better { -score } else { score };
                    let (value, status) = if fail < config.fail_prob {
                        (None, Status::OutOfMemory)
                    } else {
                        (Some(value), Status::Ok)
                    };
                    records.push(ResultRecord {
                        algorithm: format!("alg{alg:02}"),
                        dataset: format!("ds{d:02}"),
                        metric: SynthConfig::metric_name(m),
                        seed: seed as i64,
                        value,
                        status,
                    });
                }
            }
        }
    }
    ResultTable::from_records(records, registry)
}
