//! Stage-wise training with rehearsal, query tracking and curriculum
//! construction.

mod file;
mod train;

pub use train::{
    evaluate_queries, make_random_curriculum, rehearsal_sample, run_curriculum, train_stage,
    RunOutcome,
};

use std::collections::BTreeSet;

use thiserror::Error;

use crate::autodiff::AutodiffError;
use crate::fol::{validate_formula, Formula, GroundingTable, KnowledgeBase, ValidationError};
use crate::logic::LogicError;

/// Optional per-stage replacements for the run-wide defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageOverrides {
    pub epochs: Option<usize>,
    pub lr: Option<f64>,
    pub recall: Option<f64>,
}

impl StageOverrides {
    pub fn is_empty(&self) -> bool {
        self.epochs.is_none() && self.lr.is_none() && self.recall.is_none()
    }

    pub fn apply(&self, base: &StageConfig) -> StageConfig {
        StageConfig {
            epochs: self.epochs.unwrap_or(base.epochs),
            lr: self.lr.unwrap_or(base.lr),
            recall: self.recall.unwrap_or(base.recall),
            seed: base.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub rules: Vec<String>,
    pub overrides: StageOverrides,
}

impl Stage {
    pub fn new<S: Into<String>>(rules: impl IntoIterator<Item = S>) -> Self {
        Self { rules: rules.into_iter().map(Into::into).collect(), overrides: StageOverrides::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curriculum {
    pub name: String,
    pub stages: Vec<Stage>,
}

impl Curriculum {
    pub fn new(name: impl Into<String>, stages: Vec<Stage>) -> Self {
        Self { name: name.into(), stages }
    }

    /// Convenience constructor from plain rule-id lists.
    pub fn from_ids(name: impl Into<String>, stages: &[&[&str]]) -> Self {
        Self::new(name, stages.iter().map(|s| Stage::new(s.iter().copied())).collect())
    }

    /// Parses the line-oriented curriculum format:
    ///
    /// ```text
    /// # comment
    /// stage 1: rule_a, rule_b
    /// stage 2: rule_c @ epochs=200, lr=0.01, recall=1
    /// ```
    pub fn parse(name: &str, text: &str) -> Result<Self, CurriculumError> {
        file::parse(name, text)
    }

    pub fn to_text(&self) -> String {
        file::format(self)
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// Distinct rule ids across all stages, in first-appearance order.
    pub fn rule_ids(&self) -> Vec<&str> {
        let mut seen = BTreeSet::new();
        self.stages
            .iter()
            .flat_map(|s| s.rules.iter())
            .filter(|id| seen.insert(id.as_str()))
            .map(String::as_str)
            .collect()
    }

    /// Every stage non-empty, no id repeated inside a stage, every id known
    /// to the knowledge base.
    pub fn validate(&self, kb: &KnowledgeBase) -> Result<(), CurriculumError> {
        if self.stages.is_empty() {
            return Err(CurriculumError::NoStages(self.name.clone()));
        }
        for (i, stage) in self.stages.iter().enumerate() {
            if stage.rules.is_empty() {
                return Err(CurriculumError::EmptyStage { stage: i + 1 });
            }
            let mut seen = BTreeSet::new();
            for id in &stage.rules {
                if !seen.insert(id) {
                    return Err(CurriculumError::DuplicateInStage { stage: i + 1, id: id.clone() });
                }
                if kb.rule(id).is_none() {
                    return Err(CurriculumError::UnknownRule { stage: i + 1, id: id.clone() });
                }
            }
            let o = stage.overrides;
            if o.epochs == Some(0) {
                return Err(CurriculumError::BadOverride { stage: i + 1, message: "epochs must be positive".into() });
            }
            if o.lr.is_some_and(|lr| !(lr > 0.0 && lr.is_finite())) {
                return Err(CurriculumError::BadOverride { stage: i + 1, message: "lr must be positive".into() });
            }
            if o.recall.is_some_and(|r| !(0.0..=1.0).contains(&r)) {
                return Err(CurriculumError::BadOverride { stage: i + 1, message: "recall must lie in [0, 1]".into() });
            }
        }
        Ok(())
    }
}

/// Hyperparameters of one stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageConfig {
    pub epochs: usize,
    pub lr: f64,
    /// Fraction ρ of earlier rules recalled each epoch.
    pub recall: f64,
    /// Seeds the rehearsal sampler.
    pub seed: u64,
}

impl Default for StageConfig {
    fn default() -> Self {
        Self { epochs: 400, lr: 0.001, recall: 0.5, seed: 0 }
    }
}

impl StageConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        if self.epochs == 0 {
            return Err(TrainError::Config("epochs must be positive".into()));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(TrainError::Config(format!("lr must be positive, got {}", self.lr)));
        }
        if !(0.0..=1.0).contains(&self.recall) {
            return Err(TrainError::Config(format!("recall must lie in [0, 1], got {}", self.recall)));
        }
        Ok(())
    }
}

/// Formulas evaluated for monitoring only.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuerySet {
    entries: Vec<(String, Formula)>,
}

impl QuerySet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, id: impl Into<String>, formula: Formula) {
        self.entries.push((id.into(), formula));
    }

    pub fn with(mut self, id: impl Into<String>, formula: Formula) -> Self {
        self.push(id, formula);
        self
    }

    pub fn ids(&self) -> Vec<&str> {
        self.entries.iter().map(|(id, _)| id.as_str()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Formula)> {
        self.entries.iter().map(|(id, f)| (id.as_str(), f))
    }

    pub fn get(&self, id: &str) -> Option<&Formula> {
        self.entries.iter().find(|(q, _)| q == id).map(|(_, f)| f)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn validate(&self, groundings: &GroundingTable) -> Result<(), Vec<ValidationError>> {
        let errors: Vec<_> = self
            .entries
            .iter()
            .flat_map(|(id, f)| validate_formula(f, groundings, &format!("query `{id}`")))
            .collect();
        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }
}

/// Query satisfiability after every epoch.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingTrace {
    query_ids: Vec<String>,
    rows: Vec<TraceRow>,
    boundaries: Vec<usize>,
}

/// Query values recorded after one epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    /// 0-based epoch counted across the whole run.
    pub epoch: usize,
    /// 1-based stage index.
    pub stage: usize,
    /// One value per query, in query-set order.
    pub sats: Vec<f64>,
}

impl TrainingTrace {
    pub fn new(queries: &QuerySet) -> Self {
        Self { query_ids: queries.ids().into_iter().map(String::from).collect(), ..Self::default() }
    }

    pub fn query_ids(&self) -> &[String] {
        &self.query_ids
    }

    pub fn rows(&self) -> &[TraceRow] {
        &self.rows
    }

    /// First global epoch of each stage.
    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    pub fn next_epoch(&self) -> usize {
        self.rows.last().map_or(0, |r| r.epoch + 1)
    }

    pub fn begin_stage(&mut self) {
        self.boundaries.push(self.next_epoch());
    }

    pub fn stage_count(&self) -> usize {
        self.boundaries.len()
    }

    pub fn push(&mut self, stage: usize, sats: Vec<f64>) {
        debug_assert_eq!(sats.len(), self.query_ids.len());
        let epoch = self.next_epoch();
        self.rows.push(TraceRow { epoch, stage, sats });
    }

    /// Flattened `(epoch, stage, query id, sat)` records.
    pub fn records(&self) -> impl Iterator<Item = (usize, usize, &str, f64)> {
        self.rows.iter().flat_map(move |r| {
            self.query_ids.iter().zip(&r.sats).map(move |(q, &s)| (r.epoch, r.stage, q.as_str(), s))
        })
    }

    /// Values of one query over the whole run.
    pub fn series(&self, query: &str) -> Option<Vec<f64>> {
        let k = self.query_ids.iter().position(|q| q == query)?;
        Some(self.rows.iter().map(|r| r.sats[k]).collect())
    }

    /// Rows belonging to a 1-based stage.
    pub fn stage_rows(&self, stage: usize) -> &[TraceRow] {
        let start = self.rows.partition_point(|r| r.stage < stage);
        let end = self.rows.partition_point(|r| r.stage <= stage);
        &self.rows[start..end]
    }

    /// Last recorded values of a 1-based stage.
    pub fn stage_end(&self, stage: usize) -> Option<&[f64]> {
        self.stage_rows(stage).last().map(|r| r.sats.as_slice())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurriculumError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("curriculum `{0}` has no stages")]
    NoStages(String),
    #[error("stage {stage} is empty")]
    EmptyStage { stage: usize },
    #[error("stage {stage}: unknown rule id `{id}`")]
    UnknownRule { stage: usize, id: String },
    #[error("stage {stage}: rule `{id}` listed twice")]
    DuplicateInStage { stage: usize, id: String },
    #[error("stage {stage}: {message}")]
    BadOverride { stage: usize, message: String },
    #[error("cannot split {rules} rules into {stages} non-empty stages")]
    TooFewRules { rules: usize, stages: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrainError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Curriculum(#[from] CurriculumError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Autodiff(#[from] AutodiffError),
    #[error("non-finite loss at stage {stage}, epoch {epoch}; rule sats: {}", format_sats(.rule_sats))]
    NonFinite { stage: usize, epoch: usize, rule_sats: Vec<(String, f64)> },
}

fn format_sats(sats: &[(String, f64)]) -> String {
    sats.iter().map(|(id, s)| format!("{id}={s}")).collect::<Vec<_>>().join(", ")
}
