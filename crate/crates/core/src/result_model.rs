//! Benchmark results: metric registry, per-seed records, and the validated
//! complete grid they are assembled into.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, MissingCell, Result};

pub const CSV_COLUMNS: [&str; 6] = ["algorithm", "dataset", "metric", "seed", "value", "status"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "higher")]
    HigherBetter,
    #[serde(rename = "lower")]
    LowerBetter,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::HigherBetter => "higher",
            Direction::LowerBetter => "lower",
        }
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "higher" => Ok(Direction::HigherBetter),
            "lower" => Ok(Direction::LowerBetter),
            other => Err(format!("direction must be `higher` or `lower`, got `{other}`")),
        }
    }
}

/// Closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lo: f64,
    hi: f64,
}

impl Bounds {
    pub fn new(lo: f64, hi: f64) -> Option<Self> {
        (lo.is_finite() && hi.is_finite() && lo < hi).then_some(Bounds { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub name: String,
    pub direction: Direction,
    pub bounds: Option<Bounds>,
}

impl MetricSpec {
    pub fn new(name: impl Into<String>, direction: Direction) -> Self {
        MetricSpec {
            name: name.into(),
            direction,
            bounds: None,
        }
    }

    pub fn with_bounds(mut self, bounds: Bounds) -> Self {
        self.bounds = Some(bounds);
        self
    }
}

/// Metric name to direction and bounds.
///
/// The on-disk form is line oriented:
///
/// ```text
/// metric.conductance.direction = lower
/// metric.conductance.bounds = 0,1
/// ```
///
/// Blank lines and lines starting with `#` are ignored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricRegistry {
    specs: BTreeMap<String, MetricSpec>,
}

impl MetricRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a metric; names must be unique.
    pub fn insert(&mut self, spec: MetricSpec) -> Result<()> {
        if self.specs.contains_key(&spec.name) {
            return Err(Error::Registry {
                line: 0,
                message: format!("metric `{}` registered twice", spec.name),
            });
        }
        self.specs.insert(spec.name.clone(), spec);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&MetricSpec> {
        self.specs.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &MetricSpec> {
        self.specs.values()
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut directions: BTreeMap<String, (usize, Direction)> = BTreeMap::new();
        let mut bounds: BTreeMap<String, (usize, Bounds)> = BTreeMap::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Registry { line, message };
            let (key, value) = trimmed
                .split_once('=')
                .ok_or_else(|| err("expected `key = value`".into()))?;
            let (key, value) = (key.trim(), value.trim());
            let rest = key
                .strip_prefix("metric.")
                .ok_or_else(|| err(format!("unknown key `{key}`")))?;
            let (name, field) = rest
                .rsplit_once('.')
                .ok_or_else(|| err(format!("unknown key `{key}`")))?;
            if name.is_empty() {
                return Err(err("empty metric name".into()));
            }
            match field {
                "direction" => {
                    let dir = value.parse::<Direction>().map_err(err)?;
                    if directions.insert(name.to_string(), (line, dir)).is_some() {
                        return Err(err(format!("direction of `{name}` given twice")));
                    }
                }
                "bounds" => {
                    let (lo, hi) = value
                        .split_once(',')
                        .ok_or_else(|| err(format!("bounds must be `lo,hi`, got `{value}`")))?;
                    let parse = |s: &str| {
                        s.trim()
                            .parse::<f64>()
                            .map_err(|_| err(format!("bad bound `{}`", s.trim())))
                    };
                    let b = Bounds::new(parse(lo)?, parse(hi)?)
                        .ok_or_else(|| err(format!("bounds need finite lo < hi, got `{value}`")))?;
                    if bounds.insert(name.to_string(), (line, b)).is_some() {
                        return Err(err(format!("bounds of `{name}` given twice")));
                    }
                }
                other => return Err(err(format!("unknown field `{other}`"))),
            }
        }

        if let Some((name, (line, _))) = bounds.iter().find(|(n, _)| !directions.contains_key(*n)) {
            return Err(Error::Registry {
                line: *line,
                message: format!("bounds given for `{name}` without a direction"),
            });
        }

        let mut registry = MetricRegistry::new();
        for (name, (_, direction)) in directions {
            let b = bounds.get(&name).map(|(_, b)| *b);
            registry.specs.insert(
                name.clone(),
                MetricSpec {
                    name,
                    direction,
                    bounds: b,
                },
            );
        }
        Ok(registry)
    }

    pub fn to_registry_string(&self) -> String {
        let mut out = String::new();
        for spec in self.specs.values() {
            out.push_str(&format!(
                "metric.{}.direction = {}\n",
                spec.name,
                spec.direction.as_str()
            ));
            if let Some(b) = spec.bounds {
                out.push_str(&format!("metric.{}.bounds = {},{}\n", spec.name, b.lo, b.hi));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "ok")]
    Ok,
    #[serde(rename = "oom")]
    OutOfMemory,
    #[serde(rename = "timeout")]
    Timeout,
    #[serde(rename = "error")]
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::OutOfMemory => "oom",
            Status::Timeout => "timeout",
            Status::Error => "error",
        }
    }

    pub fn is_ok(self) -> bool {
        self == Status::Ok
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ok" => Ok(Status::Ok),
            "oom" => Ok(Status::OutOfMemory),
            "timeout" => Ok(Status::Timeout),
            "error" => Ok(Status::Error),
            other => Err(format!("status must be one of ok, oom, timeout, error; got `{other}`")),
        }
    }
}

/// One observed score of one algorithm on one (dataset, metric) under one seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub algorithm: String,
    pub dataset: String,
    pub metric: String,
    pub seed: i64,
    pub value: Option<f64>,
    pub status: Status,
}

/// A test is a (dataset, metric) pair. Ordering is dataset first, then metric.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TestId {
    pub dataset: String,
    pub metric: String,
}

impl TestId {
    pub fn new(dataset: impl Into<String>, metric: impl Into<String>) -> Self {
        TestId {
            dataset: dataset.into(),
            metric: metric.into(),
        }
    }
}

impl fmt::Display for TestId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.dataset, self.metric)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub value: Option<f64>,
    pub status: Status,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IngestOptions {
    /// Drop every test with at least one missing cell instead of failing.
    pub drop_incomplete: bool,
}

/// A validated, complete grid of results.
///
/// Cells are stored densely in (test, algorithm, seed) order; the suite,
/// algorithm and seed lists are sorted and deduplicated.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    registry: MetricRegistry,
    suite: Vec<TestId>,
    algorithms: Vec<String>,
    seeds: Vec<i64>,
    cells: Vec<Cell>,
}

/// Outcome of ingesting with [`IngestOptions::drop_incomplete`].
#[derive(Debug, Clone)]
pub struct Ingested {
    pub table: ResultTable,
    pub dropped: Vec<TestId>,
}

fn check_record(rec: &ResultRecord, registry: &MetricRegistry, row: usize) -> Result<()> {
    let malformed = |message: String| Error::MalformedRow { row, message };
    for (field, v) in [
        ("algorithm", &rec.algorithm),
        ("dataset", &rec.dataset),
        ("metric", &rec.metric),
    ] {
        if v.trim().is_empty() {
            return Err(malformed(format!("empty `{field}`")));
        }
    }
    let spec = registry.get(&rec.metric).ok_or_else(|| Error::UnknownMetric {
        row,
        metric: rec.metric.clone(),
    })?;
    match rec.value {
        None if rec.status.is_ok() => return Err(malformed("value is required when status is `ok`".into())),
        Some(v) if !v.is_finite() => return Err(malformed(format!("non-finite value {v}"))),
        Some(v) => {
            if let Some(b) = spec.bounds {
                if !b.contains(v) {
                    return Err(malformed(format!(
                        "value {v} outside bounds [{}, {}] of metric `{}`",
                        b.lo, b.hi, spec.name
                    )));
                }
            }
        }
        None => {}
    }
    Ok(())
}

impl ResultTable {
    /// Validates `records` into a complete grid. Row numbers in errors are
    /// 1-based positions in `records`.
    pub fn from_records(records: Vec<ResultRecord>, registry: MetricRegistry) -> Result<Self> {
        Self::from_records_with(records, registry, IngestOptions::default()).map(|i| i.table)
    }

    pub fn from_records_with(
        records: Vec<ResultRecord>,
        registry: MetricRegistry,
        options: IngestOptions,
    ) -> Result<Ingested> {
        let mut keyed: HashMap<(TestId, String, i64), Cell> = HashMap::with_capacity(records.len());
        let mut suite = BTreeSet::new();
        let mut algorithms = BTreeSet::new();
        let mut seeds = BTreeSet::new();

        for (idx, rec) in records.into_iter().enumerate() {
            let row = idx + 1;
            check_record(&rec, &registry, row)?;
            let test = TestId::new(rec.dataset.clone(), rec.metric.clone());
            suite.insert(test.clone());
            algorithms.insert(rec.algorithm.clone());
            seeds.insert(rec.seed);
            let key = (test, rec.algorithm.clone(), rec.seed);
            let cell = Cell {
                value: rec.value,
                status: rec.status,
            };
            if keyed.insert(key, cell).is_some() {
                return Err(Error::DuplicateRecord {
                    row,
                    algorithm: rec.algorithm,
                    dataset: rec.dataset,
                    metric: rec.metric,
                    seed: rec.seed,
                });
            }
        }

        let algorithms: Vec<String> = algorithms.into_iter().collect();
        let seeds: Vec<i64> = seeds.into_iter().collect();

        let mut missing = Vec::new();
        let mut dropped = Vec::new();
        let mut kept = Vec::new();
        for test in suite {
            let before = missing.len();
            for alg in &algorithms {
                for &seed in &seeds {
                    if !keyed.contains_key(&(test.clone(), alg.clone(), seed)) {
                        missing.push(MissingCell {
                            algorithm: alg.clone(),
                            dataset: test.dataset.clone(),
                            metric: test.metric.clone(),
                            seed,
                        });
                    }
                }
            }
            if missing.len() > before {
                dropped.push(test);
            } else {
                kept.push(test);
            }
        }

        if !missing.is_empty() && !options.drop_incomplete {
            return Err(Error::IncompleteGrid { missing });
        }
        if kept.is_empty() {
            return Err(Error::EmptySuite);
        }
        if algorithms.len() < 2 {
            return Err(Error::TooFewAlgorithms(algorithms.len()));
        }
        if seeds.is_empty() {
            return Err(Error::NoSeeds);
        }

        let mut cells = Vec::with_capacity(kept.len() * algorithms.len() * seeds.len());
        for test in &kept {
            for alg in &algorithms {
                for &seed in &seeds {
                    cells.push(keyed[&(test.clone(), alg.clone(), seed)]);
                }
            }
        }

        Ok(Ingested {
            table: ResultTable {
                registry,
                suite: kept,
                algorithms,
                seeds,
                cells,
            },
            dropped,
        })
    }

    pub fn registry(&self) -> &MetricRegistry {
        &self.registry
    }

    pub fn suite(&self) -> &[TestId] {
        &self.suite
    }

    pub fn algorithms(&self) -> &[String] {
        &self.algorithms
    }

    pub fn seeds(&self) -> &[i64] {
        &self.seeds
    }

    pub fn metric_spec(&self, test: usize) -> &MetricSpec {
        self.registry
            .get(&self.suite[test].metric)
            .expect("validated table references only registered metrics")
    }

    fn index(&self, test: usize, algorithm: usize, seed: usize) -> usize {
        (test * self.algorithms.len() + algorithm) * self.seeds.len() + seed
    }

    /// Cell by positional indices into `suite()`, `algorithms()` and `seeds()`.
    pub fn cell(&self, test: usize, algorithm: usize, seed: usize) -> Cell {
        self.cells[self.index(test, algorithm, seed)]
    }

    /// Records in canonical (test, algorithm, seed) order.
    pub fn records(&self) -> impl Iterator<Item = ResultRecord> + '_ {
        let (a, n) = (self.algorithms.len(), self.seeds.len());
        self.cells.iter().enumerate().map(move |(i, cell)| {
            let test = &self.suite[i / (a * n)];
            ResultRecord {
                algorithm: self.algorithms[(i / n) % a].clone(),
                dataset: test.dataset.clone(),
                metric: test.metric.clone(),
                seed: self.seeds[i % n],
                value: cell.value,
                status: cell.status,
            }
        })
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(CSV_COLUMNS)?;
        for rec in self.records() {
            let value = rec.value.map(|v| v.to_string()).unwrap_or_default();
            w.write_record([
                rec.algorithm.as_str(),
                rec.dataset.as_str(),
                rec.metric.as_str(),
                &rec.seed.to_string(),
                &value,
                rec.status.as_str(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, writer: W) -> Result<()> {
        let records: Vec<ResultRecord> = self.records().collect();
        serde_json::to_writer_pretty(writer, &records)?;
        Ok(())
    }
}

fn parse_csv<R: Read>(source: R) -> Result<Vec<ResultRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let headers = reader.headers()?.clone();
    let got: Vec<&str> = headers.iter().collect();
    if got != CSV_COLUMNS {
        return Err(Error::MalformedRow {
            row: 0,
            message: format!("header must be `{}`, got `{}`", CSV_COLUMNS.join(","), got.join(",")),
        });
    }

    let mut records = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let row_no = idx + 1;
        let row = row.map_err(|e| Error::MalformedRow {
            row: row_no,
            message: e.to_string(),
        })?;
        let malformed = |message: String| Error::MalformedRow { row: row_no, message };
        let seed = row[3]
            .parse::<i64>()
            .map_err(|_| malformed(format!("seed must be an integer, got `{}`", &row[3])))?;
        let value = match &row[4] {
            "" => None,
            s => Some(
                s.parse::<f64>()
                    .map_err(|_| malformed(format!("value must be a number, got `{s}`")))?,
            ),
        };
        let status = row[5].parse::<Status>().map_err(malformed)?;
        records.push(ResultRecord {
            algorithm: row[0].to_string(),
            dataset: row[1].to_string(),
            metric: row[2].to_string(),
            seed,
            value,
            status,
        });
    }
    Ok(records)
}

fn parse_json<R: Read>(source: R) -> Result<Vec<ResultRecord>> {
    let rows: Vec<serde_json::Value> = serde_json::from_reader(source)?;
    rows.into_iter()
        .enumerate()
        .map(|(idx, v)| {
            serde_json::from_value::<ResultRecord>(v).map_err(|e| Error::MalformedRow {
                row: idx + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

/// Decodes and validates a result table.
pub fn ingest<R: Read>(source: R, format: InputFormat, registry: MetricRegistry) -> Result<ResultTable> {
    ingest_with(source, format, registry, IngestOptions::default()).map(|i| i.table)
}

pub fn ingest_with<R: Read>(
    source: R,
    format: InputFormat,
    registry: MetricRegistry,
    options: IngestOptions,
) -> Result<Ingested> {
    let records = match format {
        InputFormat::Csv => parse_csv(source)?,
        InputFormat::Json => parse_json(source)?,
    };
    ResultTable::from_records_with(records, registry, options)
}

fn strictly_above(x: f64) -> f64 {
    let y = x + 1.0;
    if y > x {
        y
    } else {
        x + x.abs() * f64::EPSILON
    }
}

fn strictly_below(x: f64) -> f64 {
    -strictly_above(-x)
}

/// Value assigned to failed runs on one test: the worst bound when the
/// metric is bounded, otherwise one unit beyond the worst `ok` value.
fn worst_value(table: &ResultTable, test: usize) -> f64 {
    let spec = table.metric_spec(test);
    if let Some(b) = spec.bounds {
        return match spec.direction {
            Direction::HigherBetter => b.lo,
            Direction::LowerBetter => b.hi,
        };
    }
    let (a, n) = (table.algorithms.len(), table.seeds.len());
    let observed = (0..a)
        .flat_map(|alg| (0..n).map(move |s| (alg, s)))
        .map(|(alg, s)| table.cell(test, alg, s))
        .filter(|c| c.status.is_ok())
        .filter_map(|c| c.value);
    match spec.direction {
        Direction::HigherBetter => observed.reduce(f64::min).map_or(0.0, strictly_below),
        Direction::LowerBetter => observed.reduce(f64::max).map_or(0.0, strictly_above),
    }
}

/// Gives every non-`ok` record the worst possible value for its test so that
/// failures rank last and tie with each other.
pub fn resolve_failures(table: &ResultTable) -> ResultTable {
    let mut out = table.clone();
    let (a, n) = (table.algorithms.len(), table.seeds.len());
    for test in 0..table.suite.len() {
        if !(0..a * n).any(|i| !table.cells[test * a * n + i].status.is_ok()) {
            continue;
        }
        let worst = worst_value(table, test);
        for cell in &mut out.cells[test * a * n..(test + 1) * a * n] {
            if !cell.status.is_ok() {
                cell.value = Some(worst);
            }
        }
    }
    out
}
