//! Command-line front end. The `rankbench` binary parses [`Cli`] and calls
//! [`run`]; everything else lives here so it can be driven from tests.
//!
//! Exit codes: 0 success, 1 I/O or runtime failure, 2 invalid input.

mod report;

use std::fs;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

pub use report::{InputDigest, RunReport, TOOL_NAME, TOOL_VERSION};

use crate::coefficient::Coefficient;
use crate::comparison::{fcr, FrameworkResult, Granularity};
use crate::concordance::w_randomness;
use crate::error::{Error, Result};
use crate::plot::convergence_svg;
use crate::ranking::{build_rank_matrices, count_ties, write_rank_csv, RankMatrix, TiePolicy};
use crate::resampling::subsample_convergence;
use crate::result_model::{ingest_with, resolve_failures, IngestOptions, InputFormat, MetricRegistry, ResultTable};
use crate::synthgen::{generate, SynthConfig};
use crate::wasserstein::ww_randomness;

#[derive(Debug, Parser)]
#[command(
    name = "rankbench",
    version,
    about = "Quantify seed-induced randomness in benchmark rankings"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TiePolicyArg {
    Mean,
    Lowest,
}

impl From<TiePolicyArg> for TiePolicy {
    fn from(p: TiePolicyArg) -> Self {
        match p {
            TiePolicyArg::Mean => TiePolicy::MeanOfTied,
            TiePolicyArg::Lowest => TiePolicy::LowestSharedRank,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GranularityArg {
    PerAlgorithmTest,
    PerTest,
}

impl From<GranularityArg> for Granularity {
    fn from(g: GranularityArg) -> Self {
        match g {
            GranularityArg::PerAlgorithmTest => Granularity::PerAlgorithmTest,
            GranularityArg::PerTest => Granularity::PerTest,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Metric registry file (`metric.<name>.direction = higher|lower`).
    #[arg(long, global = true)]
    pub registry: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: OutputFormat,
    #[arg(long, global = true, value_enum, default_value = "mean")]
    pub tie_policy: TiePolicyArg,
    /// Scores within this distance (transitively) tie.
    #[arg(long, global = true, default_value_t = 0.0)]
    pub tie_epsilon: f64,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Drop tests with missing cells instead of rejecting the input.
    #[arg(long, global = true)]
    pub drop_incomplete: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that an input is a complete, valid result grid.
    Validate { input: PathBuf },
    /// Export per-seed rank matrices.
    Rank { input: PathBuf },
    /// Compute randomness coefficients.
    Coeff(CoeffArgs),
    /// Framework Comparison Rank across result tables.
    Fcr(FcrArgs),
    /// Subsample the suite and track coefficient convergence.
    Converge(ConvergeArgs),
    /// Generate a synthetic result table.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CoeffArgs {
    pub input: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "w,w_tied,w_wasserstein")]
    pub coefficients: Vec<Coefficient>,
    /// Also report W under the other tie policy.
    #[arg(long)]
    pub compare_tie_policies: bool,
}

#[derive(Debug, Clone, Args)]
pub struct FcrArgs {
    /// `label=path`, given once per framework.
    #[arg(long = "framework", required = true, value_parser = parse_framework)]
    pub frameworks: Vec<(String, PathBuf)>,
    #[arg(long, value_enum, default_value = "per-algorithm-test")]
    pub granularity: GranularityArg,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergeArgs {
    pub input: PathBuf,
    /// Subsample sizes, e.g. `1-44` or `1,5,10-12`. Defaults to every size.
    #[arg(long)]
    pub sizes: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "w,w_tied,w_wasserstein")]
    pub coefficients: Vec<Coefficient>,
    /// Plot data CSV (`size,repeat,coefficient,value`).
    #[arg(long)]
    pub plot_out: Option<PathBuf>,
    /// Summary CSV (`size,coefficient,mean,std`).
    #[arg(long)]
    pub summary_out: Option<PathBuf>,
    #[arg(long)]
    pub svg_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 10)]
    pub algorithms: usize,
    #[arg(long, default_value_t = 11)]
    pub datasets: usize,
    #[arg(long, default_value_t = 4)]
    pub metrics: usize,
    #[arg(long, default_value_t = 10)]
    pub seeds: usize,
    #[arg(long, default_value_t = 0.5)]
    pub quality_gap: f64,
    #[arg(long, default_value_t = 0.5)]
    pub noise_scale: f64,
    #[arg(long, default_value_t = 0.0)]
    pub tie_prob: f64,
    #[arg(long, default_value_t = 0.0)]
    pub fail_prob: f64,
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
    /// Also write the matching metric registry here.
    #[arg(long)]
    pub registry_out: Option<PathBuf>,
}

fn parse_framework(s: &str) -> std::result::Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((label, path)) if !label.is_empty() && !path.is_empty() => Ok((label.to_string(), PathBuf::from(path))),
        _ => Err(format!("expected `label=path`, got `{s}`")),
    }
}

/// Parses `1-44`, `3`, `1,5,10-12`; sizes come out in the order written.
pub fn parse_sizes(spec: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidArgument(format!("bad --sizes `{spec}`"));
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((lo, hi)) => {
                let lo: usize = lo.trim().parse().map_err(|_| bad())?;
                let hi: usize = hi.trim().parse().map_err(|_| bad())?;
                if lo > hi {
                    return Err(bad());
                }
                out.extend(lo..=hi);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| Error::File {
        path: path.display().to_string(),
        source,
    })
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::File {
        path: path.display().to_string(),
        source,
    })
}

fn input_format(path: &Path) -> InputFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("json") => InputFormat::Json,
        _ => InputFormat::Csv,
    }
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

struct Loaded {
    table: ResultTable,
    digest: InputDigest,
    warnings: Vec<String>,
    dropped: Vec<crate::result_model::TestId>,
}

fn load_registry(global: &GlobalArgs) -> Result<(MetricRegistry, InputDigest)> {
    let path = global
        .registry
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("--registry is required".into()))?;
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| Error::Registry {
        line: 0,
        message: "registry is not UTF-8".into(),
    })?;
    let registry = MetricRegistry::parse(&text)?;
    Ok((
        registry,
        InputDigest {
            label: Some("registry".into()),
            path: path.display().to_string(),
            sha256: digest(&bytes),
        },
    ))
}

fn load_table(path: &Path, registry: &MetricRegistry, global: &GlobalArgs, label: Option<String>) -> Result<Loaded> {
    let bytes = read_file(path)?;
    let ingested = ingest_with(
        bytes.as_slice(),
        input_format(path),
        registry.clone(),
        IngestOptions {
            drop_incomplete: global.drop_incomplete,
        },
    )?;
    let warnings = ingested
        .dropped
        .iter()
        .map(|t| format!("{}: dropped, grid incomplete", t))
        .collect();
    Ok(Loaded {
        table: ingested.table,
        digest: InputDigest {
            label,
            path: path.display().to_string(),
            sha256: digest(&bytes),
        },
        warnings,
        dropped: ingested.dropped,
    })
}

fn base_report(
    command: &'static str,
    global: &GlobalArgs,
    registry: &MetricRegistry,
    reg_digest: InputDigest,
    loaded: &Loaded,
) -> RunReport {
    let mut report = RunReport::new(command, registry, global.tie_policy.into(), global.tie_epsilon);
    report.inputs = vec![loaded.digest.clone(), reg_digest];
    report.n_tests = loaded.table.suite().len();
    report.n_algorithms = loaded.table.algorithms().len();
    report.n_seeds = loaded.table.seeds().len();
    report.dropped_tests = loaded.dropped.clone();
    report.warnings.extend(loaded.warnings.iter().cloned());
    report
}

fn matrices(table: &ResultTable, policy: TiePolicy, epsilon: f64) -> Result<Vec<RankMatrix>> {
    build_rank_matrices(&resolve_failures(table), policy, epsilon)
}

/// Checks an input grid. Diagnostics for invalid input come back as the error.
pub fn cmd_validate(input: &Path, global: &GlobalArgs) -> Result<String> {
    let (registry, reg_digest) = load_registry(global)?;
    let loaded = load_table(input, &registry, global, None)?;
    let report = base_report("validate", global, &registry, reg_digest, &loaded);
    Ok(match global.format {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Csv => format!(
            "valid,tests,algorithms,seeds,dropped\ntrue,{},{},{},{}\n",
            report.n_tests,
            report.n_algorithms,
            report.n_seeds,
            report.dropped_tests.len()
        ),
    })
}

pub fn cmd_rank(input: &Path, global: &GlobalArgs) -> Result<String> {
    let (registry, _) = load_registry(global)?;
    let loaded = load_table(input, &registry, global, None)?;
    let ms = matrices(&loaded.table, global.tie_policy.into(), global.tie_epsilon)?;
    match global.format {
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            write_rank_csv(&loaded.table, &ms, &mut buf)?;
            Ok(String::from_utf8(buf).expect("utf-8"))
        }
        OutputFormat::Json => {
            let t = &loaded.table;
            let rows: Vec<serde_json::Value> = ms
                .iter()
                .flat_map(|m| {
                    t.seeds().iter().enumerate().flat_map(move |(s, seed)| {
                        t.algorithms().iter().enumerate().map(move |(a, alg)| {
                            serde_json::json!({
                                "dataset": m.test().dataset,
                                "metric": m.test().metric,
                                "seed": seed,
                                "algorithm": alg,
                                "rank": m.rank(s, a),
                            })
                        })
                    })
                })
                .collect();
            Ok(serde_json::to_string_pretty(&rows)? + "\n")
        }
    }
}

pub fn coeff_report(args: &CoeffArgs, global: &GlobalArgs) -> Result<RunReport> {
    if args.coefficients.is_empty() {
        return Err(Error::NoCoefficients);
    }
    let (registry, reg_digest) = load_registry(global)?;
    let loaded = load_table(&args.input, &registry, global, None)?;
    let mut report = base_report("coeff", global, &registry, reg_digest, &loaded);

    let policy: TiePolicy = global.tie_policy.into();
    let selected = matrices(&loaded.table, policy, global.tie_epsilon)?;
    let mean = if policy == TiePolicy::MeanOfTied {
        selected.clone()
    } else {
        matrices(&loaded.table, TiePolicy::MeanOfTied, global.tie_epsilon)?
    };

    let mut wanted: Vec<Coefficient> = args.coefficients.clone();
    wanted.sort();
    wanted.dedup();
    for c in wanted {
        let result = match c {
            Coefficient::W => w_randomness(&selected, false)?,
            Coefficient::WTied => {
                if policy != TiePolicy::MeanOfTied {
                    report
                        .warnings
                        .push("w_tied is always computed from mean-of-tied ranks".into());
                }
                w_randomness(&mean, true)?
            }
            Coefficient::WWasserstein => ww_randomness(&selected)?,
        };
        if c == Coefficient::W && args.compare_tie_policies {
            let other = match policy {
                TiePolicy::MeanOfTied => TiePolicy::LowestSharedRank,
                TiePolicy::LowestSharedRank => TiePolicy::MeanOfTied,
            };
            let other_result = w_randomness(&matrices(&loaded.table, other, global.tie_epsilon)?, false)?;
            report.warnings.extend(result.warnings.iter().cloned());
            report.warnings.extend(other_result.warnings.iter().cloned());
            let mut pair = [result, other_result];
            pair.sort_by_key(|r| r.tie_policy.as_str());
            report.coefficients.extend(pair);
            continue;
        }
        report.warnings.extend(result.warnings.iter().cloned());
        report.coefficients.push(result);
    }
    report.n_ties = Some(count_ties(&selected));
    Ok(report)
}

pub fn cmd_coeff(args: &CoeffArgs, global: &GlobalArgs) -> Result<String> {
    let report = coeff_report(args, global)?;
    match global.format {
        OutputFormat::Json => Ok(report.to_json()),
        OutputFormat::Csv => report.coefficients_csv(),
    }
}

pub fn fcr_report(args: &FcrArgs, global: &GlobalArgs) -> Result<RunReport> {
    let (registry, reg_digest) = load_registry(global)?;
    let mut frameworks = Vec::with_capacity(args.frameworks.len());
    let mut loaded_all = Vec::with_capacity(args.frameworks.len());
    for (label, path) in &args.frameworks {
        let loaded = load_table(path, &registry, global, Some(label.clone()))?;
        frameworks.push(FrameworkResult::new(label.clone(), loaded.table.clone()));
        loaded_all.push(loaded);
    }
    let first = loaded_all
        .first()
        .ok_or_else(|| Error::InvalidArgument("no --framework given".into()))?;
    let mut report = base_report("fcr", global, &registry, reg_digest.clone(), first);
    report.inputs = loaded_all.iter().map(|l| l.digest.clone()).collect();
    report.inputs.push(reg_digest);
    for l in &loaded_all[1..] {
        report.warnings.extend(l.warnings.iter().cloned());
    }
    report.fcr = Some(fcr(&frameworks, args.granularity.into())?);
    Ok(report)
}

pub fn cmd_fcr(args: &FcrArgs, global: &GlobalArgs) -> Result<String> {
    let report = fcr_report(args, global)?;
    match global.format {
        OutputFormat::Json => Ok(report.to_json()),
        OutputFormat::Csv => report.fcr_csv(),
    }
}

pub fn converge_report(args: &ConvergeArgs, global: &GlobalArgs) -> Result<RunReport> {
    let (registry, reg_digest) = load_registry(global)?;
    let loaded = load_table(&args.input, &registry, global, None)?;
    let mut report = base_report("converge", global, &registry, reg_digest, &loaded);
    let policy: TiePolicy = global.tie_policy.into();
    if policy != TiePolicy::MeanOfTied && args.coefficients.contains(&Coefficient::WTied) {
        return Err(Error::InvalidArgument(
            "w_tied needs --tie-policy mean; drop it from --coefficients or switch policy".into(),
        ));
    }
    let ms = matrices(&loaded.table, policy, global.tie_epsilon)?;
    let sizes = match &args.sizes {
        Some(spec) => parse_sizes(spec)?,
        None => (1..=ms.len()).collect(),
    };
    let conv = subsample_convergence(&ms, &args.coefficients, &sizes, args.repeats, args.rng_seed)?;

    if let Some(path) = &args.plot_out {
        let mut buf = Vec::new();
        conv.write_plot_csv(&mut buf)?;
        write_file(path, &buf)?;
    }
    if let Some(path) = &args.summary_out {
        let mut buf = Vec::new();
        conv.write_summary_csv(&mut buf)?;
        write_file(path, &buf)?;
    }
    if let Some(path) = &args.svg_out {
        write_file(path, convergence_svg(&conv).as_bytes())?;
    }

    for c in &conv.coefficients {
        let result = match c {
            Coefficient::W => w_randomness(&ms, false)?,
            Coefficient::WTied => w_randomness(&ms, true)?,
            Coefficient::WWasserstein => ww_randomness(&ms)?,
        };
        report.warnings.extend(result.warnings);
    }
    report.n_ties = Some(count_ties(&ms));
    report.rng_seed = Some(args.rng_seed);
    report.convergence = Some(conv);
    Ok(report)
}

pub fn cmd_converge(args: &ConvergeArgs, global: &GlobalArgs) -> Result<String> {
    let report = converge_report(args, global)?;
    match global.format {
        OutputFormat::Json => Ok(report.to_json()),
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            report
                .convergence
                .as_ref()
                .expect("converge sets convergence")
                .write_summary_csv(&mut buf)?;
            Ok(String::from_utf8(buf).expect("utf-8"))
        }
    }
}

pub fn cmd_synth(args: &SynthArgs, global: &GlobalArgs) -> Result<String> {
    let config = SynthConfig {
        n_algorithms: args.algorithms,
        n_datasets: args.datasets,
        n_metrics: args.metrics,
        n_seeds: args.seeds,
        quality_gap: args.quality_gap,
        noise_scale: args.noise_scale,
        tie_prob: args.tie_prob,
        fail_prob: args.fail_prob,
        rng_seed: args.rng_seed,
    };
    let table = generate(&config)?;
    if let Some(path) = &args.registry_out {
        write_file(path, table.registry().to_registry_string().as_bytes())?;
    }
    let mut buf = Vec::new();
    match global.format {
        OutputFormat::Csv => table.write_csv(&mut buf)?,
        OutputFormat::Json => {
            table.write_json(&mut buf)?;
            buf.push(b'\n');
        }
    }
    Ok(String::from_utf8(buf).expect("utf-8"))
}

/// Runs one command and returns its main output.
pub fn run(cli: &Cli) -> Result<String> {
    let g = &cli.global;
    if !(g.tie_epsilon.is_finite() && g.tie_epsilon >= 0.0) {
        return Err(Error::InvalidEpsilon(g.tie_epsilon));
    }
    match &cli.command {
        Command::Validate { input } => cmd_validate(input, g),
        Command::Rank { input } => cmd_rank(input, g),
        Command::Coeff(args) => cmd_coeff(args, g),
        Command::Fcr(args) => cmd_fcr(args, g),
        Command::Converge(args) => cmd_converge(args, g),
        Command::Synth(args) => cmd_synth(args, g),
    }
}

/// Runs and delivers output to `--output` or stdout; returns the exit code.
pub fn main_with(cli: &Cli) -> i32 {
    match run(cli) {
        Ok(out) => match &cli.global.output {
            Some(path) => match write_file(path, out.as_bytes()) {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            },
            None => {
                let mut stdout = std::io::stdout().lock();
                match stdout.write_all(out.as_bytes()).and_then(|()| stdout.flush()) {
                    Ok(()) => 0,
                    // A reader such as `head` closing early is not an error.
                    Err(e) if e.kind() == ErrorKind::BrokenPipe => 0,
                    Err(e) => {
                        eprintln!("error: {e}");
                        1
                    }
                }
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_parse() {
        assert_eq!(parse_sizes("1-3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_sizes("1,5,10-12").unwrap(), vec![1, 5, 10, 11, 12]);
        assert!(parse_sizes("3-1").is_err());
        assert!(parse_sizes("x").is_err());
        assert!(parse_sizes("").is_err());
    }

    #[test]
    fn framework_arg() {
        assert_eq!(
            parse_framework("hpo=a.csv").unwrap(),
            ("hpo".into(), PathBuf::from("a.csv"))
        );
        assert!(parse_framework("hpo").is_err());
        assert!(parse_framework("=a.csv").is_err());
    }

    #[test]
    fn parses_global_flags_after_subcommand() {
        let cli = Cli::try_parse_from([
            "rankbench",
            "coeff",
            "in.csv",
            "--registry",
            "r.txt",
            "--tie-policy",
            "lowest",
            "--format",
            "csv",
            "--coefficients",
            "w,w_wasserstein",
        ])
        .unwrap();
        assert_eq!(cli.global.tie_policy, TiePolicyArg::Lowest);
        assert_eq!(cli.global.format, OutputFormat::Csv);
        match cli.command {
            Command::Coeff(a) => assert_eq!(a.coefficients, vec![Coefficient::W, Coefficient::WWasserstein]),
            other => panic!("{other:?}"),
        }
    }
}
