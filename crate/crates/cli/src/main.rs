//! `creason`: run curriculum experiments, check rule files, slice traces.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use continual_reasoning::curriculum::Curriculum;
use continual_reasoning::experiment::{
    parse_curricula, read_trace_csv, run_experiment, trace_to_csv, write_atomic, write_outputs, ConfigOverrides,
    ExperimentConfig, ExperimentError, Seeds,
};
use continual_reasoning::fol::{parse_kb, validate_kb, validate_rules, KnowledgeBase, ValidationError};
use continual_reasoning::tasks::TaskKind;

const EXIT_VALIDATION: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_DIVERGED: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "creason", version, about = "Continual reasoning with differentiable fuzzy logic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train curricula over a seed sweep and write results, traces and config.
    Run(RunArgs),
    /// Parse and validate a rule file and optional curriculum files.
    Check(CheckArgs),
    /// Print a slice of a trace file.
    Trace(TraceArgs),
}

#[derive(Args)]
struct RunArgs {
    /// `key = value` config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// pet or sf.
    #[arg(long)]
    task: Option<String>,
    /// Comma-separated: baseline, ts, kc, random.
    #[arg(long)]
    curricula: Option<String>,
    /// A count (`10`), a list (`1,5,9`) or a range (`0..10`).
    #[arg(long)]
    seeds: Option<String>,
    /// Epochs per stage.
    #[arg(long)]
    epochs: Option<usize>,
    /// Epochs of the single baseline stage (default: 3 × epochs).
    #[arg(long)]
    baseline_epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    /// Fraction of earlier rules recalled each epoch.
    #[arg(long)]
    recall: Option<f64>,
    /// Exponent for every aggregator.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    p_forall: Option<f64>,
    #[arg(long)]
    p_exists: Option<f64>,
    #[arg(long)]
    p_kb: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Concurrent runs (0 = all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct CheckArgs {
    /// Rule file (`id : formula  # label` per line).
    kb: PathBuf,
    /// Curriculum files to resolve against the rules.
    #[arg(long = "curriculum")]
    curricula: Vec<PathBuf>,
    /// Also validate against a built-in task's groundings.
    #[arg(long)]
    task: Option<String>,
}

#[derive(Args)]
struct TraceArgs {
    /// Trace CSV written by `run`.
    file: PathBuf,
    #[arg(long)]
    curriculum: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    query: Option<String>,
    #[arg(long)]
    stage: Option<usize>,
    /// First epoch (inclusive).
    #[arg(long)]
    from: Option<usize>,
    /// Last epoch (inclusive).
    #[arg(long)]
    to: Option<usize>,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        let code = match e {
            ExperimentError::Config(_) => EXIT_CONFIG,
            ExperimentError::Diverged { .. } => EXIT_DIVERGED,
            ExperimentError::Io { .. } => EXIT_IO,
            ExperimentError::Format(_) => EXIT_VALIDATION,
        };
        Failure::new(code, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Check(args) => cmd_check(args),
        Command::Trace(args) => cmd_trace(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn flag_overrides(a: &RunArgs) -> Result<ConfigOverrides, ExperimentError> {
    let mut o = ConfigOverrides::default();
    if let Some(t) = &a.task {
        o.set("task", t)?;
    }
    if let Some(c) = &a.curricula {
        o.curricula = Some(parse_curricula(c));
    }
    if let Some(s) = &a.seeds {
        o.seeds = Some(Seeds::parse(s)?);
    }
    o.epochs = a.epochs;
    o.baseline_epochs = a.baseline_epochs;
    o.lr = a.lr;
    o.recall = a.recall;
    o.p = a.p;
    o.p_forall = a.p_forall;
    o.p_exists = a.p_exists;
    o.p_kb = a.p_kb;
    o.out = a.out.clone();
    o.jobs = a.jobs;
    Ok(o)
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let file = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::new(EXIT_CONFIG, format!("{}: {e}", path.display())))?;
            Some(ConfigOverrides::parse(&text)?)
        }
        None => None,
    };
    let cfg = ExperimentConfig::resolve(file.as_ref(), &flag_overrides(&args)?);
    let output = run_experiment(&cfg)?;
    let files = write_outputs(&cfg, &output)?;
    for row in output.report.rows() {
        println!(
            "{:<10} stage {}  {:<28} {:.4} ± {:.4}  (n={})",
            row.curriculum, row.stage, row.query, row.mean_sat, row.std_sat, row.n_seeds
        );
    }
    println!("wrote {}, {}, {}", files.results.display(), files.trace.display(), files.config.display());
    Ok(())
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn invalid(errors: Vec<ValidationError>) -> Failure {
    let lines: Vec<String> = errors.iter().map(ToString::to_string).collect();
    Failure::new(EXIT_VALIDATION, lines.join("\n"))
}

fn cmd_check(args: CheckArgs) -> Result<(), Failure> {
    let text = read_text(&args.kb)?;
    let mut kb: KnowledgeBase = parse_kb(&text)
        .map_err(|e| Failure::new(EXIT_VALIDATION, format!("{}: {e}", args.kb.display())))?;
    validate_rules(&kb).map_err(invalid)?;
    if let Some(task) = &args.task {
        let kind: TaskKind = task.parse().map_err(|e: continual_reasoning::tasks::TaskError| {
            Failure::new(EXIT_CONFIG, e.to_string())
        })?;
        let bundle = kind.build(0).map_err(|e| Failure::new(EXIT_CONFIG, e.to_string()))?;
        kb.groundings = bundle.kb.groundings;
        validate_kb(&kb).map_err(invalid)?;
    }
    println!("{}: {} rules", args.kb.display(), kb.rules().len());
    for rule in kb.rules() {
        println!("  {} : {}", rule.id, rule.formula);
    }
    for path in &args.curricula {
        let name = path.file_stem().map_or("curriculum".into(), |s| s.to_string_lossy().into_owned());
        let c = Curriculum::parse(&name, &read_text(path)?)
            .and_then(|c| c.validate(&kb).map(|()| c))
            .map_err(|e| Failure::new(EXIT_VALIDATION, format!("{}: {e}", path.display())))?;
        println!("{}: {} stages", path.display(), c.len());
        for (i, stage) in c.stages.iter().enumerate() {
            println!("  stage {}: {} rules ({})", i + 1, stage.rules.len(), stage.rules.join(", "));
        }
    }
    Ok(())
}

fn cmd_trace(args: TraceArgs) -> Result<(), Failure> {
    let rows = read_trace_csv(&args.file)?;
    let keep: Vec<_> = rows
        .into_iter()
        .filter(|r| args.curriculum.as_ref().is_none_or(|c| &r.curriculum == c))
        .filter(|r| args.seed.is_none_or(|s| r.seed == s))
        .filter(|r| args.query.as_ref().is_none_or(|q| &r.query == q))
        .filter(|r| args.stage.is_none_or(|s| r.stage == s))
        .filter(|r| args.from.is_none_or(|e| r.epoch >= e))
        .filter(|r| args.to.is_none_or(|e| r.epoch <= e))
        .collect();
    let text = trace_to_csv(&keep);
    match &args.out {
        Some(path) => write_atomic(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(())
}
