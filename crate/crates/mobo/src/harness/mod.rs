//! Batch experiment driver: configuration, the problem × method × repeat
//! grid, persistence, statistics, and summary tables.
//!
//! An experiment runs every configured method on every problem for R
//! repeats. All methods on one (problem, repeat) cell share an identical
//! initial design (same design seed), so final scores can be compared with
//! paired statistics. Each finished run is written immediately as one
//! line-delimited JSON file that is self-contained: summaries never need the
//! problems re-evaluated.

mod stats;

pub use stats::{
    holm_bonferroni, median, quartiles, wilcoxon_signed_rank_one_sided,
    EXACT_ENUMERATION_LIMIT,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::acquire::{run, IterationRecord, ModelKind, RunConfig, RunTrace};
use crate::indicators::{hv_indicator, igd_plus, normalise_front, read_reference_set};
use crate::problems::{reference_ideal_points, ProblemSpec};
use crate::scalarise::ScalariserId;
use crate::{Error, Result};

/// A sample-count rule that either scales with the problem dimension
/// (written `"2d"`, `"1024d"`) or is a fixed count (written `"40"`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum CountRule {
    /// `coefficient × d` samples for a d-dimensional problem.
    PerDimension(usize),
    /// The same count for every problem.
    Fixed(usize),
}

impl CountRule {
    /// The concrete count for a problem of dimension `d`.
    pub fn resolve(&self, d: usize) -> usize {
        match *self {
            CountRule::PerDimension(c) => c * d,
            CountRule::Fixed(c) => c,
        }
    }
}

impl fmt::Display for CountRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountRule::PerDimension(c) => write!(f, "{c}d"),
            CountRule::Fixed(c) => write!(f, "{c}"),
        }
    }
}

impl FromStr for CountRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        let bad = || {
            Error::ConfigParse(format!(
                "'{trimmed}' is not a count rule (expected e.g. '2d', '1024d' or '40')"
            ))
        };
        if let Some(coefficient) = trimmed.strip_suffix(['d', 'D']) {
            if coefficient.is_empty() {
                return Ok(CountRule::PerDimension(1));
            }
            let c: usize = coefficient.parse().map_err(|_| bad())?;
            if c == 0 {
                return Err(bad());
            }
            Ok(CountRule::PerDimension(c))
        } else {
            let c: usize = trimmed.parse().map_err(|_| bad())?;
            Ok(CountRule::Fixed(c))
        }
    }
}

impl From<CountRule> for String {
    fn from(rule: CountRule) -> String {
        rule.to_string()
    }
}

impl TryFrom<String> for CountRule {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// One column of the experiment grid: a surrogate family plus, for
/// model-based methods, the scalariser it optimises. Labelled
/// `"GBT_AT"`-style; plain `"RANDOM"` for the no-model control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct MethodSpec {
    /// Surrogate family.
    pub model: ModelKind,
    /// Scalariser for model-based methods; [`None`] exactly for RANDOM.
    pub scalariser: Option<ScalariserId>,
}

impl MethodSpec {
    /// A model-based grid cell.
    pub fn new(model: ModelKind, scalariser: ScalariserId) -> Result<MethodSpec> {
        if model == ModelKind::Random {
            return Err(Error::InvalidArgument(
                "random search takes no scalariser".into(),
            ));
        }
        Ok(MethodSpec {
            model,
            scalariser: Some(scalariser),
        })
    }

    /// The random-search control method.
    pub fn random() -> MethodSpec {
        MethodSpec {
            model: ModelKind::Random,
            scalariser: None,
        }
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.scalariser {
            Some(s) => write!(f, "{}_{}", self.model, s),
            None => write!(f, "{}", self.model),
        }
    }
}

impl FromStr for MethodSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('_') {
            None => {
                let model: ModelKind = s.parse()?;
                if model != ModelKind::Random {
                    return Err(Error::InvalidArgument(format!(
                        "method '{s}' needs a scalariser, e.g. '{model}_AT'"
                    )));
                }
                Ok(MethodSpec::random())
            }
            Some((model, scalariser)) => {
                MethodSpec::new(model.parse()?, scalariser.parse()?)
            }
        }
    }
}

impl From<MethodSpec> for String {
    fn from(method: MethodSpec) -> String {
        method.to_string()
    }
}

impl TryFrom<String> for MethodSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

fn default_models() -> Vec<ModelKind> {
    vec![ModelKind::Gbt, ModelKind::Mlp, ModelKind::Gp]
}

fn default_scalarisers() -> Vec<ScalariserId> {
    ScalariserId::ALL.to_vec()
}

fn default_true() -> bool {
    true
}

fn default_repeats() -> usize {
    21
}

fn default_gamma() -> f64 {
    1.0 / 3.0
}

fn default_initial_samples() -> CountRule {
    CountRule::PerDimension(2)
}

fn default_post_init() -> usize {
    300
}

fn default_acquisition_budget() -> CountRule {
    CountRule::PerDimension(1024)
}

/// Environment variable supplying the default output directory.
pub const OUT_DIR_ENV: &str = "MOBO_OUT_DIR";

/// The default output directory: `$MOBO_OUT_DIR` when set, else `runs`.
/// An explicit `out_dir` in a config file or on the command line wins.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("runs"))
}

fn default_jobs() -> usize {
    1
}

fn default_alpha() -> f64 {
    0.05
}

/// Full description of a batch experiment. Deserialises from a TOML file in
/// which every field except `problems` has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Problem keys, e.g. `"DTLZ2_5_2"` or `"WFG4_10_3"`.
    pub problems: Vec<String>,
    /// Surrogate families forming the method grid (crossed with
    /// `scalarisers`).
    #[serde(default = "default_models")]
    pub models: Vec<ModelKind>,
    /// Scalarisers forming the method grid.
    #[serde(default = "default_scalarisers")]
    pub scalarisers: Vec<ScalariserId>,
    /// Whether the RANDOM control column is added to the grid.
    #[serde(default = "default_true")]
    pub include_random: bool,
    /// Repeats per (problem, method) cell.
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    /// Global seed mixed into every per-run seed.
    #[serde(default)]
    pub base_seed: u64,
    /// Labelling quantile for the classifier-guided methods.
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Initial-design size rule (default `"2d"`).
    #[serde(default = "default_initial_samples")]
    pub initial_samples: CountRule,
    /// Model-guided evaluations after the initial design (default 300).
    #[serde(default = "default_post_init")]
    pub post_init_evaluations: usize,
    /// Acquisition-maximisation budget rule (default `"1024d"`).
    #[serde(default = "default_acquisition_budget")]
    pub acquisition_budget: CountRule,
    /// Directory receiving one record file per run.
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    /// Concurrent runs (each run itself stays single-threaded).
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    /// Family-wise significance level used by summaries.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Optional per-problem reference-set files enabling the IGD+ series.
    #[serde(default)]
    pub reference_sets: BTreeMap<String, PathBuf>,
}

impl ExperimentConfig {
    /// Parse a TOML document.
    pub fn from_toml(text: &str) -> Result<ExperimentConfig> {
        toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))
    }

    /// Read and parse a TOML file.
    pub fn from_toml_file(path: &Path) -> Result<ExperimentConfig> {
        let text = fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    /// The method grid: models × scalarisers, plus the RANDOM column when
    /// enabled.
    pub fn methods(&self) -> Vec<MethodSpec> {
        let mut grid = Vec::new();
        for &model in &self.models {
            for &scalariser in &self.scalarisers {
                grid.push(MethodSpec {
                    model,
                    scalariser: Some(scalariser),
                });
            }
        }
        if self.include_random {
            grid.push(MethodSpec::random());
        }
        grid
    }

    /// Parse every problem key.
    pub fn problem_specs(&self) -> Result<Vec<ProblemSpec>> {
        self.problems.iter().map(|key| key.parse()).collect()
    }

    /// Check field ranges, the method grid, problem keys, and that every
    /// problem has tabulated indicator bounds.
    pub fn validate(&self) -> Result<()> {
        if self.problems.is_empty() {
            return Err(Error::InvalidArgument("no problems configured".into()));
        }
        if self.repeats == 0 {
            return Err(Error::InvalidArgument("repeats must be ≥ 1".into()));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "gamma must lie in (0, 1], got {}",
                self.gamma
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.jobs == 0 {
            return Err(Error::InvalidArgument("jobs must be ≥ 1".into()));
        }
        if self.methods().is_empty() {
            return Err(Error::InvalidArgument(
                "the method grid is empty (no models × scalarisers, random disabled)".into(),
            ));
        }
        if self.models.contains(&ModelKind::Random) {
            return Err(Error::InvalidArgument(
                "RANDOM is controlled by include_random, not the models list".into(),
            ));
        }
        let mut seen = BTreeSet::new();
        for problem in self.problem_specs()? {
            // Indicator bounds must exist or every run of the problem would
            // fail at scoring time.
            reference_ideal_points(&problem)?;
            if !seen.insert(problem.key()) {
                return Err(Error::InvalidArgument(format!(
                    "problem {} listed twice",
                    problem.key()
                )));
            }
        }
        for key in self.reference_sets.keys() {
            if !self.problems.contains(key) {
                return Err(Error::InvalidArgument(format!(
                    "reference set given for unconfigured problem {key}"
                )));
            }
        }
        Ok(())
    }

    /// The fully resolved run configuration for one grid cell.
    ///
    /// All methods share the design seed of their (problem, repeat) cell, so
    /// their initial archives are identical; the run seed additionally mixes
    /// in the method label.
    pub fn run_config(
        &self,
        problem: &ProblemSpec,
        method: MethodSpec,
        repeat: usize,
    ) -> RunConfig {
        let d = problem.d();
        let initial_samples = self.initial_samples.resolve(d);
        let key = problem.key();
        let repeat_label = repeat.to_string();
        RunConfig {
            problem: problem.clone(),
            // Random search never touches the scalariser; any fixed value
            // keeps the config serialisable.
            scalariser: method.scalariser.unwrap_or(ScalariserId::At),
            model: method.model,
            gamma: self.gamma,
            initial_samples,
            total_evaluations: initial_samples + self.post_init_evaluations,
            acquisition_budget: self.acquisition_budget.resolve(d),
            seed: mix_seed(
                self.base_seed,
                &[&key, &method.to_string(), &repeat_label],
            ),
            design_seed: mix_seed(self.base_seed, &["design", &key, &repeat_label]),
        }
    }
}

/// 64-bit FNV-1a over the labels (with separators), XOR-folded with the base
/// seed: distinct label tuples give distinct, platform-independent seeds.
fn mix_seed(base: u64, parts: &[&str]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut hash = OFFSET;
    for part in parts {
        for &byte in part.as_bytes() {
            hash ^= u64::from(byte);
            hash = hash.wrapping_mul(PRIME);
        }
        hash ^= 0x1f;
        hash = hash.wrapping_mul(PRIME);
    }
    hash ^ base
}

/// Everything needed to re-analyse one run without re-executing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    /// Grid column this run belongs to.
    pub method: MethodSpec,
    /// Repeat index within the cell.
    pub repeat: usize,
    /// Ideal point used for indicator normalisation.
    pub ideal: Vec<f64>,
    /// Reference point used for indicator normalisation.
    pub ref_point: Vec<f64>,
    /// The full run trace, including its configuration.
    pub trace: RunTrace,
    /// Normalised hypervolume of the archive after each evaluation.
    pub hv_series: Vec<f64>,
    /// IGD+ of the normalised archive after each evaluation, when a
    /// reference set was supplied for the problem.
    pub igd_series: Option<Vec<f64>>,
}

impl RunRecord {
    /// The problem this run optimised.
    pub fn problem(&self) -> &ProblemSpec {
        &self.trace.config.problem
    }

    /// Final normalised hypervolume (none for an empty trace).
    pub fn final_hv(&self) -> Option<f64> {
        self.hv_series.last().copied()
    }
}

/// Score a finished trace: cumulative normalised hypervolume after every
/// evaluation, plus the IGD+ series when a reference set is supplied.
pub fn evaluate_record(
    trace: RunTrace,
    method: MethodSpec,
    repeat: usize,
    ideal: &[f64],
    ref_point: &[f64],
    reference_set: Option<&[Vec<f64>]>,
) -> Result<RunRecord> {
    let mut archive: Vec<Vec<f64>> = Vec::with_capacity(trace.len());
    let mut hv_series = Vec::with_capacity(trace.len());
    let mut igd_series = reference_set.map(|_| Vec::with_capacity(trace.len()));
    for record in &trace.records {
        archive.push(record.f.clone());
        hv_series.push(hv_indicator(&archive, ideal, ref_point)?);
        if let (Some(series), Some(z)) = (igd_series.as_mut(), reference_set) {
            let normalised = normalise_front(&archive, ideal, ref_point)?;
            series.push(igd_plus(&normalised, z)?);
        }
    }
    Ok(RunRecord {
        method,
        repeat,
        ideal: ideal.to_vec(),
        ref_point: ref_point.to_vec(),
        trace,
        hv_series,
        igd_series,
    })
}

const RECORD_SCHEMA_VERSION: u32 = 1;

/// First line of a record file: run identity and scoring context.
#[derive(Debug, Serialize, Deserialize)]
struct HeaderLine {
    record: String,
    version: u32,
    method: MethodSpec,
    repeat: usize,
    ideal: Vec<f64>,
    ref_point: Vec<f64>,
    config: RunConfig,
}

/// One evaluation per line: the iteration record plus its indicator values.
#[derive(Debug, Serialize, Deserialize)]
struct IterationLine {
    record: String,
    #[serde(flatten)]
    inner: IterationRecord,
    hv: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    igd_plus: Option<f64>,
}

/// Canonical record filename: `PROBLEM__METHOD__rNNN.jsonl`.
pub fn record_filename(problem: &ProblemSpec, method: MethodSpec, repeat: usize) -> String {
    format!("{}__{}__r{:03}.jsonl", problem.key(), method, repeat)
}

/// Write one run record as line-delimited JSON: a header line followed by
/// one line per evaluation. Returns the file path.
pub fn write_run_record(record: &RunRecord, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(record_filename(
        record.problem(),
        record.method,
        record.repeat,
    ));
    let file = fs::File::create(&path)?;
    let mut out = BufWriter::new(file);
    let header = HeaderLine {
        record: "header".into(),
        version: RECORD_SCHEMA_VERSION,
        method: record.method,
        repeat: record.repeat,
        ideal: record.ideal.clone(),
        ref_point: record.ref_point.clone(),
        config: record.trace.config.clone(),
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    for (i, iteration) in record.trace.records.iter().enumerate() {
        let line = IterationLine {
            record: "iteration".into(),
            inner: iteration.clone(),
            hv: record.hv_series[i],
            igd_plus: record.igd_series.as_ref().map(|s| s[i]),
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(path)
}

/// Read a record file written by [`write_run_record`].
pub fn read_run_record(path: &Path) -> Result<RunRecord> {
    let file = fs::File::open(path)?;
    let mut lines = BufReader::new(file).lines();
    let header_text = lines.next().ok_or_else(|| {
        Error::ConfigParse(format!("{}: empty record file", path.display()))
    })??;
    let header: HeaderLine = serde_json::from_str(&header_text)?;
    if header.record != "header" || header.version != RECORD_SCHEMA_VERSION {
        return Err(Error::ConfigParse(format!(
            "{}: not a version-{RECORD_SCHEMA_VERSION} record file",
            path.display()
        )));
    }
    let mut records = Vec::new();
    let mut hv_series = Vec::new();
    let mut igd_values: Vec<Option<f64>> = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: IterationLine = serde_json::from_str(&line)?;
        if parsed.record != "iteration" {
            return Err(Error::ConfigParse(format!(
                "{}: unexpected record kind '{}'",
                path.display(),
                parsed.record
            )));
        }
        records.push(parsed.inner);
        hv_series.push(parsed.hv);
        igd_values.push(parsed.igd_plus);
    }
    let igd_series = if igd_values.iter().all(Option::is_some) && !igd_values.is_empty() {
        Some(igd_values.into_iter().map(Option::unwrap).collect())
    } else if igd_values.iter().all(Option::is_none) {
        None
    } else {
        return Err(Error::ConfigParse(format!(
            "{}: IGD+ present on some lines but not all",
            path.display()
        )));
    };
    Ok(RunRecord {
        method: header.method,
        repeat: header.repeat,
        ideal: header.ideal,
        ref_point: header.ref_point,
        trace: RunTrace {
            config: header.config,
            records,
        },
        hv_series,
        igd_series,
    })
}

/// Load every `.jsonl` record in a directory, sorted by filename.
pub fn load_records(dir: &Path) -> Result<Vec<RunRecord>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .map(|entry| entry.path())
        .filter(|p| p.extension().is_some_and(|ext| ext == "jsonl"))
        .collect();
    paths.sort();
    paths.iter().map(|p| read_run_record(p)).collect()
}

/// Outcome of one grid cell: the persisted record path, or the error text
/// when the run failed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    /// Problem of the cell.
    pub problem: ProblemSpec,
    /// Method of the cell.
    pub method: MethodSpec,
    /// Repeat index of the cell.
    pub repeat: usize,
    /// Path of the written record, or the failure message.
    pub result: std::result::Result<PathBuf, String>,
}

struct Job<'a> {
    problem: &'a ProblemSpec,
    ideal: &'a [f64],
    ref_point: &'a [f64],
    reference_set: Option<&'a [Vec<f64>]>,
    method: MethodSpec,
    repeat: usize,
}

fn execute_job(config: &ExperimentConfig, job: &Job<'_>) -> std::result::Result<PathBuf, String> {
    let run_config = config.run_config(job.problem, job.method, job.repeat);
    let trace = run(&run_config).map_err(|e| e.to_string())?;
    let record = evaluate_record(
        trace,
        job.method,
        job.repeat,
        job.ideal,
        job.ref_point,
        job.reference_set,
    )
    .map_err(|e| e.to_string())?;
    write_run_record(&record, &config.out_dir).map_err(|e| e.to_string())
}

/// Execute the full problem × method × repeat grid.
///
/// Runs are independent; up to `config.jobs` execute concurrently, each
/// single-threaded. Every finished run is written to `config.out_dir`
/// immediately. A failing run is reported in its outcome (and appended to
/// `failures.log`) without stopping the rest. Outcomes are returned sorted
/// by (problem, method, repeat).
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RunOutcome>> {
    config.validate()?;
    fs::create_dir_all(&config.out_dir)?;
    let problems = config.problem_specs()?;
    let methods = config.methods();
    let mut bounds = Vec::with_capacity(problems.len());
    for problem in &problems {
        bounds.push(reference_ideal_points(problem)?);
    }
    let mut reference_sets: BTreeMap<String, Vec<Vec<f64>>> = BTreeMap::new();
    for (key, path) in &config.reference_sets {
        reference_sets.insert(key.clone(), read_reference_set(path)?);
    }

    let mut jobs = Vec::new();
    for (problem, (ideal, ref_point)) in problems.iter().zip(&bounds) {
        let reference_set = reference_sets.get(&problem.key()).map(Vec::as_slice);
        for repeat in 0..config.repeats {
            for &method in &methods {
                jobs.push(Job {
                    problem,
                    ideal,
                    ref_point,
                    reference_set,
                    method,
                    repeat,
                });
            }
        }
    }

    let next = AtomicUsize::new(0);
    let outcomes: Mutex<Vec<RunOutcome>> = Mutex::new(Vec::with_capacity(jobs.len()));
    let workers = config.jobs.min(jobs.len()).max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                let Some(job) = jobs.get(index) else {
                    break;
                };
                let result = execute_job(config, job);
                let outcome = RunOutcome {
                    problem: job.problem.clone(),
                    method: job.method,
                    repeat: job.repeat,
                    result,
                };
                outcomes.lock().expect("no panics hold this lock").push(outcome);
            });
        }
    });
    let mut outcomes = outcomes.into_inner().expect("workers have exited");
    outcomes.sort_by(|a, b| {
        (a.problem.key(), a.method, a.repeat).cmp(&(b.problem.key(), b.method, b.repeat))
    });

    let failures: Vec<String> = outcomes
        .iter()
        .filter_map(|o| {
            o.result.as_ref().err().map(|message| {
                format!("{} {} r{:03}: {message}", o.problem.key(), o.method, o.repeat)
            })
        })
        .collect();
    if !failures.is_empty() {
        fs::write(
            config.out_dir.join("failures.log"),
            failures.join("\n") + "\n",
        )?;
    }
    Ok(outcomes)
}

/// Per-method row of a problem's summary table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    /// Method label.
    pub method: String,
    /// Repeats that contributed a final hypervolume.
    pub repeats: usize,
    /// Median final normalised hypervolume.
    pub median_final_hv: f64,
    /// Interquartile range of the final hypervolume.
    pub iqr_final_hv: f64,
    /// Whether this method holds the largest median.
    pub is_best: bool,
    /// Whether this method is the best or statistically indistinguishable
    /// from it (one-sided test, Holm-corrected).
    pub equivalent_to_best: bool,
    /// Holm-corrected decision input: the raw one-sided p-value of
    /// best > this method (absent for the best method itself).
    pub p_value: Option<f64>,
}

/// One problem's comparison table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemSummary {
    /// Problem key.
    pub problem: String,
    /// Label of the best method.
    pub best_method: String,
    /// Per-method rows, sorted by method label.
    pub methods: Vec<MethodSummary>,
}

/// Cross-problem summary: per-problem tables plus best-or-equivalent counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    /// One table per summarisable problem, sorted by problem key.
    pub problems: Vec<ProblemSummary>,
    /// Per method label: number of problems where it was best or equivalent.
    pub best_counts: BTreeMap<String, usize>,
    /// Problems skipped and why.
    pub warnings: Vec<String>,
}

/// Minimum repeats per method for a problem to be summarised.
pub const MIN_SUMMARY_REPEATS: usize = 5;

/// Build the comparison tables: per problem, find the method with the best
/// median final hypervolume, then count as "equivalent" every method whose
/// one-sided paired test (best > method) is not rejected after Holm
/// correction at `alpha`.
///
/// Problems with fewer than two methods, fewer than
/// [`MIN_SUMMARY_REPEATS`] repeats, or unpaired repeat sets are skipped with
/// a warning rather than failing the whole summary.
pub fn summarise(records: &[RunRecord], alpha: f64) -> Result<ExperimentSummary> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    // problem key → method label → repeat → final hv
    let mut table: BTreeMap<String, BTreeMap<String, BTreeMap<usize, f64>>> = BTreeMap::new();
    for record in records {
        let Some(final_hv) = record.final_hv() else {
            continue;
        };
        table
            .entry(record.problem().key())
            .or_default()
            .entry(record.method.to_string())
            .or_default()
            .insert(record.repeat, final_hv);
    }

    let mut problems = Vec::new();
    let mut warnings = Vec::new();
    let mut best_counts: BTreeMap<String, usize> = BTreeMap::new();
    for record in records {
        best_counts.entry(record.method.to_string()).or_insert(0);
    }

    'problems: for (problem, methods) in &table {
        if methods.len() < 2 {
            warnings.push(format!(
                "{problem}: only {} method(s) present, skipped",
                methods.len()
            ));
            continue;
        }
        let repeat_sets: Vec<&BTreeMap<usize, f64>> = methods.values().collect();
        let first_repeats: BTreeSet<usize> = repeat_sets[0].keys().copied().collect();
        if first_repeats.len() < MIN_SUMMARY_REPEATS {
            warnings.push(format!(
                "{problem}: {} repeat(s) < {MIN_SUMMARY_REPEATS}, skipped",
                first_repeats.len()
            ));
            continue;
        }
        for (label, repeats) in methods {
            let this: BTreeSet<usize> = repeats.keys().copied().collect();
            if this != first_repeats {
                warnings.push(format!(
                    "{problem}: method {label} has unpaired repeats, skipped"
                ));
                continue 'problems;
            }
        }

        // Paired final-HV vectors in repeat order, one per method.
        let labels: Vec<&String> = methods.keys().collect();
        let finals: Vec<Vec<f64>> = methods
            .values()
            .map(|repeats| repeats.values().copied().collect())
            .collect();
        let medians: Vec<f64> = finals
            .iter()
            .map(|values| median(values))
            .collect::<Result<_>>()?;
        let best_index = medians
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.total_cmp(b))
            .map(|(i, _)| i)
            .expect("at least two methods");

        let mut p_values = Vec::new();
        let mut tested = Vec::new();
        for (i, values) in finals.iter().enumerate() {
            if i == best_index {
                continue;
            }
            p_values.push(wilcoxon_signed_rank_one_sided(&finals[best_index], values)?);
            tested.push(i);
        }
        let rejected = holm_bonferroni(&p_values, alpha)?;

        let mut rows = Vec::new();
        for (i, label) in labels.iter().enumerate() {
            let (q1, q2, q3) = quartiles(&finals[i])?;
            let position = tested.iter().position(|&t| t == i);
            let equivalent = match position {
                None => true, // the best method itself
                Some(p) => !rejected[p],
            };
            if equivalent {
                *best_counts.entry((*label).clone()).or_insert(0) += 1;
            }
            rows.push(MethodSummary {
                method: (*label).clone(),
                repeats: finals[i].len(),
                median_final_hv: q2,
                iqr_final_hv: q3 - q1,
                is_best: i == best_index,
                equivalent_to_best: equivalent,
                p_value: position.map(|p| p_values[p]),
            });
        }
        problems.push(ProblemSummary {
            problem: problem.clone(),
            best_method: labels[best_index].clone(),
            methods: rows,
        });
    }

    Ok(ExperimentSummary {
        problems,
        best_counts,
        warnings,
    })
}

/// One (problem, method, iteration) aggregate of the hypervolume series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    /// Problem key.
    pub problem: String,
    /// Method label.
    pub method: String,
    /// Zero-based evaluation index.
    pub iteration: usize,
    /// Runs contributing at this iteration.
    pub repeats: usize,
    /// First quartile of the normalised hypervolume.
    pub q1_hv: f64,
    /// Median normalised hypervolume.
    pub median_hv: f64,
    /// Third quartile of the normalised hypervolume.
    pub q3_hv: f64,
}

/// Median/IQR hypervolume trajectories per (problem, method, iteration),
/// sorted by problem, method, iteration.
pub fn convergence_series(records: &[RunRecord]) -> Result<Vec<ConvergenceRow>> {
    let mut groups: BTreeMap<(String, String), Vec<&RunRecord>> = BTreeMap::new();
    for record in records {
        groups
            .entry((record.problem().key(), record.method.to_string()))
            .or_default()
            .push(record);
    }
    let mut rows = Vec::new();
    for ((problem, method), group) in &groups {
        let longest = group.iter().map(|r| r.hv_series.len()).max().unwrap_or(0);
        for iteration in 0..longest {
            let values: Vec<f64> = group
                .iter()
                .filter_map(|r| r.hv_series.get(iteration).copied())
                .collect();
            let (q1, q2, q3) = quartiles(&values)?;
            rows.push(ConvergenceRow {
                problem: problem.clone(),
                method: method.clone(),
                iteration,
                repeats: values.len(),
                q1_hv: q1,
                median_hv: q2,
                q3_hv: q3,
            });
        }
    }
    Ok(rows)
}

/// Write the per-problem summary tables as CSV (one row per problem ×
/// method).
pub fn write_summary_csv(summary: &ExperimentSummary, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(csv_error)?;
    writer
        .write_record([
            "problem",
            "method",
            "repeats",
            "median_final_hv",
            "iqr_final_hv",
            "is_best",
            "equivalent_to_best",
            "p_value",
        ])
        .map_err(csv_error)?;
    for problem in &summary.problems {
        for row in &problem.methods {
            writer
                .write_record([
                    problem.problem.as_str(),
                    row.method.as_str(),
                    &row.repeats.to_string(),
                    &format!("{}", row.median_final_hv),
                    &format!("{}", row.iqr_final_hv),
                    &row.is_best.to_string(),
                    &row.equivalent_to_best.to_string(),
                    &row.p_value.map_or(String::new(), |p| format!("{p}")),
                ])
                .map_err(csv_error)?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// Write the cross-problem best-or-equivalent counts as CSV.
pub fn write_best_counts_csv(summary: &ExperimentSummary, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(csv_error)?;
    writer
        .write_record(["method", "best_or_equivalent"])
        .map_err(csv_error)?;
    for (method, count) in &summary.best_counts {
        writer
            .write_record([method.as_str(), &count.to_string()])
            .map_err(csv_error)?;
    }
    writer.flush()?;
    Ok(())
}

/// Write convergence rows as CSV.
pub fn write_convergence_csv(rows: &[ConvergenceRow], path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(csv_error)?;
    writer
        .write_record([
            "problem",
            "method",
            "iteration",
            "repeats",
            "q1_hv",
            "median_hv",
            "q3_hv",
        ])
        .map_err(csv_error)?;
    for row in rows {
        writer
            .write_record([
                row.problem.as_str(),
                row.method.as_str(),
                &row.iteration.to_string(),
                &row.repeats.to_string(),
                &format!("{}", row.q1_hv),
                &format!("{}", row.median_hv),
                &format!("{}", row.q3_hv),
            ])
            .map_err(csv_error)?;
    }
    writer.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    Error::ConfigParse(format!("csv: {e}"))
}
