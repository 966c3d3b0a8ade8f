use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use rayon::prelude::*;

use crate::curriculum::{run_curriculum, Curriculum, RunOutcome, StageConfig};

use super::report::{aggregate_seeds, write_atomic, write_results_csv, write_trace_csv, ReportRow, TraceCsvRow};
use super::{ExperimentConfig, ExperimentError, ExperimentReport};

/// One finished (curriculum, seed) run.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub curriculum_name: String,
    pub seed: u64,
    /// The stages actually trained (random curricula differ per seed).
    pub curriculum: Curriculum,
    pub outcome: RunOutcome,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub report: ExperimentReport,
    /// Sorted by (curriculum, seed).
    pub runs: Vec<RunRecord>,
}

impl ExperimentOutput {
    pub fn trace_rows(&self) -> Vec<TraceCsvRow> {
        let mut rows = Vec::new();
        for run in &self.runs {
            for (epoch, stage, query, sat) in run.outcome.trace.records() {
                rows.push(TraceCsvRow {
                    seed: run.seed,
                    curriculum: run.curriculum_name.clone(),
                    stage,
                    epoch,
                    query: query.to_string(),
                    sat,
                });
            }
        }
        rows
    }

    pub fn runs_of<'a>(&'a self, curriculum: &'a str) -> impl Iterator<Item = &'a RunRecord> + 'a {
        self.runs.iter().filter(move |r| r.curriculum_name == curriculum)
    }
}

/// Validates the config and resolves every curriculum name against the task.
pub fn check_config(cfg: &ExperimentConfig) -> Result<(), ExperimentError> {
    cfg.validate()?;
    let bundle = cfg.task.build(0).map_err(|e| ExperimentError::Config(e.to_string()))?;
    for name in &cfg.curricula {
        bundle.curriculum(name, 0).map_err(|e| ExperimentError::Config(e.to_string()))?;
    }
    Ok(())
}

fn run_one(cfg: &ExperimentConfig, name: &str, seed: u64) -> Result<RunRecord, ExperimentError> {
    let mut bundle = cfg.task.build(seed).map_err(|e| ExperimentError::Config(e.to_string()))?;
    let curriculum = bundle.curriculum(name, seed).map_err(|e| ExperimentError::Config(e.to_string()))?;
    let defaults = StageConfig { epochs: cfg.epochs_for(name), lr: cfg.lr, recall: cfg.recall, seed };
    let outcome = run_curriculum(&mut bundle.kb, &curriculum, &defaults, &cfg.connectives, &bundle.queries, seed)
        .map_err(|source| ExperimentError::Diverged { curriculum: name.to_string(), seed, source })?;
    Ok(RunRecord { curriculum_name: name.to_string(), seed, curriculum, outcome })
}

/// Runs every curriculum × seed (concurrently up to `jobs`) and aggregates
/// end-of-stage query values.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput, ExperimentError> {
    check_config(cfg)?;
    let jobs: Vec<(String, u64)> = cfg
        .curricula
        .iter()
        .flat_map(|c| cfg.seeds.to_vec().into_iter().map(move |s| (c.clone(), s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| ExperimentError::Config(format!("thread pool: {e}")))?;
    let mut runs: Vec<RunRecord> = pool.install(|| {
        jobs.par_iter().map(|(c, s)| run_one(cfg, c, *s)).collect::<Result<_, _>>()
    })?;
    runs.sort_by(|a, b| (&a.curriculum_name, a.seed).cmp(&(&b.curriculum_name, b.seed)));
    Ok(ExperimentOutput { report: aggregate_runs(&runs)?, runs })
}

/// Mean ± std over seeds of every (curriculum, stage, query) end value.
pub fn aggregate_runs(runs: &[RunRecord]) -> Result<ExperimentReport, ExperimentError> {
    let mut groups: BTreeMap<(String, usize, String), Vec<f64>> = BTreeMap::new();
    for run in runs {
        let trace = &run.outcome.trace;
        for stage in 1..=trace.stage_count() {
            let Some(values) = trace.stage_end(stage) else { continue };
            for (q, &v) in trace.query_ids().iter().zip(values) {
                groups.entry((run.curriculum_name.clone(), stage, q.clone())).or_default().push(v);
            }
        }
    }
    let rows = groups
        .into_iter()
        .map(|((curriculum, stage, query), values)| {
            let (mean_sat, std_sat) = aggregate_seeds(&values)?;
            Ok(ReportRow { curriculum, stage, query, mean_sat, std_sat, n_seeds: values.len() })
        })
        .collect::<Result<_, ExperimentError>>()?;
    Ok(ExperimentReport::from_rows(rows))
}

/// Paths written by [`write_outputs`].
#[derive(Debug, Clone)]
pub struct OutputFiles {
    pub results: PathBuf,
    pub trace: PathBuf,
    pub config: PathBuf,
    pub curricula: PathBuf,
}

/// Writes `results.csv`, `trace.csv`, the resolved `config.txt` and the
/// per-seed `curricula.txt` into `cfg.out`.
pub fn write_outputs(cfg: &ExperimentConfig, output: &ExperimentOutput) -> Result<OutputFiles, ExperimentError> {
    fs::create_dir_all(&cfg.out).map_err(|e| ExperimentError::io(&cfg.out, e))?;
    let files = OutputFiles {
        results: cfg.out.join("results.csv"),
        trace: cfg.out.join("trace.csv"),
        config: cfg.out.join("config.txt"),
        curricula: cfg.out.join("curricula.txt"),
    };
    write_results_csv(&output.report, &files.results)?;
    write_trace_csv(&output.trace_rows(), &files.trace)?;
    write_atomic(&files.config, cfg.to_text().as_bytes())?;
    let mut listing = String::new();
    for run in &output.runs {
        listing.push_str(&format!("# {} seed {}\n{}", run.curriculum_name, run.seed, run.curriculum.to_text()));
    }
    write_atomic(&files.curricula, listing.as_bytes())?;
    Ok(files)
}
