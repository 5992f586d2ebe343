//! Measure how much seed-to-seed randomness perturbs algorithm rankings in a
//! benchmark suite.
//!
//! A *test* is one (dataset, metric) pair. Every algorithm is scored on every
//! test under every seed; per seed the algorithms are ranked, and the
//! coefficients below summarise how much those rankings disagree:
//!
//! - [`concordance::w_randomness`]: one minus the mean Kendall's W over tests,
//!   optionally with the tie correction for mean-of-tied ranks.
//! - [`wasserstein::ww_randomness`]: one minus the mean normalised pairwise
//!   Wasserstein-1 distance between per-algorithm rank distributions.
//! - [`comparison::fcr`]: Framework Comparison Rank, pitting whole result
//!   tables (e.g. default against tuned hyperparameters) against each other.
//! - [`resampling::subsample_convergence`]: how each coefficient behaves when
//!   only a subset of the suite is evaluated.
//!
//! ```
//! use rankbench::{build_rank_matrices, ingest, resolve_failures, w_randomness};
//! use rankbench::{InputFormat, MetricRegistry, TiePolicy};
//!
//! let registry = MetricRegistry::parse("metric.nmi.direction = higher\n").unwrap();
//! let csv = "algorithm,dataset,metric,seed,value,status
//! a,cora,nmi,1,0.50,ok
//! b,cora,nmi,1,0.40,ok
//! a,cora,nmi,2,0.45,ok
//! b,cora,nmi,2,0.48,ok
//! ";
//! let table = resolve_failures(&ingest(csv.as_bytes(), InputFormat::Csv, registry).unwrap());
//! let ranks = build_rank_matrices(&table, TiePolicy::MeanOfTied, 0.0).unwrap();
//! let w = w_randomness(&ranks, false).unwrap();
//! assert_eq!(w.value, 1.0); // the two seeds disagree completely
//! ```

pub mod cli;
pub mod coefficient;
pub mod comparison;
pub mod concordance;
pub mod error;
pub mod plot;
pub mod ranking;
pub mod resampling;
pub mod result_model;
pub mod synthgen;
pub mod wasserstein;

pub use coefficient::{Coefficient, CoefficientResult, TestValue};
pub use comparison::{fcr, FcrResult, FrameworkResult, Granularity};
pub use concordance::{kendall_w_test, kendall_w_tied_test, w_randomness, ConcordanceStats};
pub use error::{Error, MissingCell, Result};
pub use ranking::{build_rank_matrices, count_ties, rank_row, Rank, RankMatrix, RankedRow, TiePolicy};
pub use resampling::{subsample_convergence, ConvergenceReport};
pub use result_model::{
    ingest, ingest_with, resolve_failures, Bounds, Direction, IngestOptions, InputFormat, MetricRegistry, MetricSpec,
    ResultRecord, ResultTable, Status, TestId,
};
pub use synthgen::{generate, SynthConfig};
pub use wasserstein::{normalizer, w1_distance, ww_randomness, ww_test, RankDistribution};
