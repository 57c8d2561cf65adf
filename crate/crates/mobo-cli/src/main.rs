//! `mobo` — batch experiment driver for the `mobo` library.
//!
//! Verbs: `run` executes an experiment configuration, `summarise` turns a
//! directory of run records into comparison tables, `convergence` exports
//! median/IQR hypervolume trajectories for plotting, and `list-problems`
//! prints the benchmark grid.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use mobo::acquire::ModelKind;
use mobo::harness::{
    convergence_series, default_out_dir, load_records, run_experiment, summarise,
    write_best_counts_csv, write_convergence_csv, write_summary_csv, CountRule, ExperimentConfig,
    ExperimentSummary,
};
use mobo::problems::ProblemSpec;
use mobo::scalarise::ScalariserId;

#[derive(Parser)]
#[command(
    name = "mobo",
    version,
    about = "Multi-objective black-box optimisation experiments",
    after_help = "The default output directory is $MOBO_OUT_DIR when set, else ./runs."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment configuration (TOML), one record file per run.
    Run(Box<RunArgs>),
    /// Summarise a directory of run records into comparison tables.
    Summarise(SummariseArgs),
    /// Export median/IQR hypervolume trajectories as CSV plot data.
    Convergence(ConvergenceArgs),
    /// List the available benchmark problems and their key format.
    ListProblems,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration file (TOML). Every key can be overridden by
    /// the flag of the same name below; with no file, flags alone define
    /// the experiment.
    config: Option<PathBuf>,

    /// Problem keys, e.g. DTLZ2_5_2,WFG4_10_3 (overrides `problems`).
    #[arg(long, value_delimiter = ',')]
    problems: Option<Vec<String>>,

    /// Surrogate families: GBT, MLP, GP (overrides `models`).
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<String>>,

    /// Scalarisers: AT, HYPI, DOMRANK, PHC (overrides `scalarisers`).
    #[arg(long, value_delimiter = ',')]
    scalarisers: Option<Vec<String>>,

    /// Whether the RANDOM control is added to the method grid
    /// (overrides `include_random`).
    #[arg(long)]
    include_random: Option<bool>,

    /// Repeats per (problem, method) cell (overrides `repeats`).
    #[arg(long)]
    repeats: Option<usize>,

    /// Global seed mixed into every per-run seed (overrides `base_seed`).
    #[arg(long, visible_alias = "base-seed")]
    seed: Option<u64>,

    /// Labelling quantile in (0, 1] (overrides `gamma`).
    #[arg(long)]
    gamma: Option<f64>,

    /// Initial-design size rule, e.g. "2d" or "40"
    /// (overrides `initial_samples`).
    #[arg(long)]
    initial_samples: Option<String>,

    /// Model-guided evaluations after the initial design
    /// (overrides `post_init_evaluations`).
    #[arg(long)]
    post_init_evaluations: Option<usize>,

    /// Acquisition-maximisation budget rule, e.g. "1024d" or "4096"
    /// (overrides `acquisition_budget`).
    #[arg(long)]
    acquisition_budget: Option<String>,

    /// Output directory for record files (overrides `out_dir`).
    #[arg(long, visible_alias = "out-dir")]
    out: Option<PathBuf>,

    /// Concurrent runs; each run itself is single-threaded
    /// (overrides `jobs`).
    #[arg(long)]
    jobs: Option<usize>,

    /// Significance level for summaries (overrides `alpha`).
    #[arg(long)]
    alpha: Option<f64>,

    /// Reference-set file for a problem, as KEY=PATH; repeatable
    /// (overrides `reference_sets` entries of the same key).
    #[arg(long = "reference-set", value_name = "KEY=PATH")]
    reference_sets: Vec<String>,
}

#[derive(Args)]
struct SummariseArgs {
    /// Directory of run records (default: $MOBO_OUT_DIR or ./runs).
    records: Option<PathBuf>,

    /// Significance level for the equivalent-to-best decision.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,

    /// Directory receiving summary.csv and best_counts.csv
    /// (default: the records directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConvergenceArgs {
    /// Directory of run records (default: $MOBO_OUT_DIR or ./runs).
    records: Option<PathBuf>,

    /// Output CSV path (default: <records>/convergence.csv).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run_command(*args),
        Command::Summarise(args) => summarise_command(args),
        Command::Convergence(args) => convergence_command(args),
        Command::ListProblems => list_problems_command(),
    };
    match outcome {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::FAILURE
        }
    }
}

/// Build the effective configuration: file (or defaults), then flags on top.
fn effective_config(args: &RunArgs) -> Result<ExperimentConfig> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::from_toml_file(path)
            .with_context(|| format!("reading {}", path.display()))?,
        // An empty problem list parses fine and validate() rejects it later
        // unless --problems fills it in.
        None => ExperimentConfig::from_toml("problems = []")?,
    };
    if let Some(problems) = &args.problems {
        config.problems = problems.clone();
    }
    if let Some(models) = &args.models {
        config.models = models
            .iter()
            .map(|s| s.parse::<ModelKind>())
            .collect::<mobo::Result<_>>()?;
    }
    if let Some(scalarisers) = &args.scalarisers {
        config.scalarisers = scalarisers
            .iter()
            .map(|s| s.parse::<ScalariserId>())
            .collect::<mobo::Result<_>>()?;
    }
    if let Some(include_random) = args.include_random {
        config.include_random = include_random;
    }
    if let Some(repeats) = args.repeats {
        config.repeats = repeats;
    }
    if let Some(seed) = args.seed {
        config.base_seed = seed;
    }
    if let Some(gamma) = args.gamma {
        config.gamma = gamma;
    }
    if let Some(rule) = &args.initial_samples {
        config.initial_samples = rule.parse::<CountRule>()?;
    }
    if let Some(n) = args.post_init_evaluations {
        config.post_init_evaluations = n;
    }
    if let Some(rule) = &args.acquisition_budget {
        config.acquisition_budget = rule.parse::<CountRule>()?;
    }
    if let Some(out) = &args.out {
        config.out_dir = out.clone();
    }
    if let Some(jobs) = args.jobs {
        config.jobs = jobs;
    }
    if let Some(alpha) = args.alpha {
        config.alpha = alpha;
    }
    for entry in &args.reference_sets {
        let (key, path) = entry
            .split_once('=')
            .with_context(|| format!("--reference-set '{entry}' is not KEY=PATH"))?;
        config
            .reference_sets
            .insert(key.to_string(), PathBuf::from(path));
    }
    Ok(config)
}

fn run_command(args: RunArgs) -> Result<ExitCode> {
    let config = effective_config(&args)?;
    let outcomes = run_experiment(&config).context("running the experiment")?;
    let failures: Vec<_> = outcomes
        .iter()
        .filter_map(|o| o.result.as_ref().err().map(|e| (o, e)))
        .collect();
    for (outcome, error) in &failures {
        eprintln!(
            "failed: {} {} repeat {}: {error}",
            outcome.problem.key(),
            outcome.method,
            outcome.repeat
        );
    }
    println!(
        "{} runs completed, {} failed; records in {}",
        outcomes.len() - failures.len(),
        failures.len(),
        config.out_dir.display()
    );
    if failures.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("details in {}", config.out_dir.join("failures.log").display());
        Ok(ExitCode::FAILURE)
    }
}

fn print_summary(summary: &ExperimentSummary) {
    for problem in &summary.problems {
        println!("{} — best: {}", problem.problem, problem.best_method);
        println!(
            "  {:<12} {:>7} {:>12} {:>10} {:>10}   verdict",
            "method", "repeats", "median_hv", "iqr_hv", "p_value"
        );
        for row in &problem.methods {
            let p = row
                .p_value
                .map_or_else(|| "-".to_string(), |p| format!("{p:.4}"));
            let verdict = if row.is_best {
                "best"
            } else if row.equivalent_to_best {
                "equivalent"
            } else {
                "worse"
            };
            println!(
                "  {:<12} {:>7} {:>12.6} {:>10.6} {:>10}   {verdict}",
                row.method, row.repeats, row.median_final_hv, row.iqr_final_hv, p
            );
        }
        println!();
    }
    if !summary.best_counts.is_empty() {
        println!(
            "best-or-equivalent counts over {} problem(s):",
            summary.problems.len()
        );
        for (method, count) in &summary.best_counts {
            println!("  {method:<12} {count}");
        }
    }
    for warning in &summary.warnings {
        eprintln!("warning: {warning}");
    }
}

fn summarise_command(args: SummariseArgs) -> Result<ExitCode> {
    let records_dir = args.records.unwrap_or_else(default_out_dir);
    let records = load_records(&records_dir)
        .with_context(|| format!("loading records from {}", records_dir.display()))?;
    if records.is_empty() {
        bail!("no record files found in {}", records_dir.display());
    }
    let summary = summarise(&records, args.alpha)?;
    print_summary(&summary);

    let out_dir = args.out.unwrap_or_else(|| records_dir.clone());
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;
    let summary_path = out_dir.join("summary.csv");
    let counts_path = out_dir.join("best_counts.csv");
    write_summary_csv(&summary, &summary_path)?;
    write_best_counts_csv(&summary, &counts_path)?;
    println!(
        "wrote {} and {}",
        summary_path.display(),
        counts_path.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn convergence_command(args: ConvergenceArgs) -> Result<ExitCode> {
    let records_dir = args.records.unwrap_or_else(default_out_dir);
    let records = load_records(&records_dir)
        .with_context(|| format!("loading records from {}", records_dir.display()))?;
    if records.is_empty() {
        bail!("no record files found in {}", records_dir.display());
    }
    let rows = convergence_series(&records)?;
    let out_path = args
        .out
        .unwrap_or_else(|| records_dir.join("convergence.csv"));
    if let Some(parent) = out_path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("creating {}", parent.display()))?;
    }
    write_convergence_csv(&rows, &out_path)?;
    println!("wrote {} rows to {}", rows.len(), out_path.display());
    Ok(ExitCode::SUCCESS)
}

fn list_problems_command() -> Result<ExitCode> {
    println!("Problem keys: FAMILY<id>_<d>_<m> — decision dimension d, objectives m.");
    println!("All problems are evaluated on the unit box [0,1]^d.");
    println!();
    println!("DTLZ1–DTLZ7  (needs d ≥ m ≥ 2)");
    let dtlz = [
        "multimodal; linear front on Σf = 1/2",
        "concave spherical front, Σf² = 1",
        "multimodal variant of DTLZ2",
        "DTLZ2 with strong parameter bias",
        "degenerate curved front",
        "degenerate curved front, hardened distance function",
        "disconnected mixed front",
    ];
    for (i, description) in dtlz.iter().enumerate() {
        println!("  DTLZ{}  {description}", i + 1);
    }
    println!();
    println!("WFG1–WFG9  (position parameters k: 4 if m = 2, else 2m−1; needs d > k)");
    let wfg = [
        "convex-mixed front, flatness and polynomial bias",
        "convex disconnected front, non-separable",
        "linear degenerate front, non-separable",
        "concave front, multimodal",
        "concave front, deceptive",
        "concave front, non-separable",
        "concave front, parameter-dependent bias",
        "concave front, non-separable bias",
        "concave front, deceptive and biased",
    ];
    for (i, description) in wfg.iter().enumerate() {
        println!("  WFG{}  {description}", i + 1);
    }
    println!();
    println!("Examples with the default WFG split (k position + l distance):");
    for key in ["DTLZ2_5_2", "DTLZ7_10_3", "WFG4_10_3", "WFG1_6_2"] {
        let spec: ProblemSpec = key.parse().expect("example keys are valid");
        match spec.wfg_kl() {
            Some((k, l)) => println!("  {key:<12} d = {}, m = {}, k = {k}, l = {l}", spec.d(), spec.m()),
            None => println!("  {key:<12} d = {}, m = {}", spec.d(), spec.m()),
        }
    }
    Ok(ExitCode::SUCCESS)
}
