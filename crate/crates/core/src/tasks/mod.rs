//! Built-in tasks: the penguin exception task and smokers & friends.

mod facts;
mod pet;
mod sf;

pub use facts::{FactsError, SfFacts};
pub use pet::{build_pet, pet_curricula, PetConfig, PET_KB};
pub use sf::{build_sf, sf_curricula, SfConfig, PERSONS, SF_KB};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::curriculum::{make_random_curriculum, Curriculum, CurriculumError, QuerySet};
use crate::fol::{parse_formula, validate_kb, KbParseError, KnowledgeBase, ValidationError};

/// Default hidden layer widths of every predicate network.
pub const DEFAULT_HIDDEN: [usize; 2] = [16, 16];

/// Stage count of generated random curricula.
pub const RANDOM_STAGES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TaskKind {
    Pet,
    Sf,
}

impl TaskKind {
    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Pet => "pet",
            TaskKind::Sf => "sf",
        }
    }

    /// Bundle with default configuration for `seed`.
    pub fn build(self, seed: u64) -> Result<TaskBundle, TaskError> {
        match self {
            TaskKind::Pet => build_pet(&PetConfig { seed, ..PetConfig::default() }),
            TaskKind::Sf => build_sf(&SfConfig { seed, ..SfConfig::default() }),
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TaskKind {
    type Err = TaskError;

    fn from_str(s: &str) -> Result<Self, TaskError> {
        match s {
            "pet" => Ok(TaskKind::Pet),
            "sf" => Ok(TaskKind::Sf),
            _ => Err(TaskError::UnknownTask(s.to_string())),
        }
    }
}

/// Knowledge base with groundings, named curricula and monitoring queries.
#[derive(Debug, Clone)]
pub struct TaskBundle {
    pub kind: TaskKind,
    pub kb: KnowledgeBase,
    /// Fixed curricula; `random` is generated on demand.
    pub curricula: BTreeMap<String, Curriculum>,
    pub queries: QuerySet,
}

impl TaskBundle {
    /// Names accepted by [`TaskBundle::curriculum`].
    pub fn curriculum_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.curricula.keys().cloned().collect();
        names.push("random".into());
        names
    }

    /// A named curriculum; `random` is drawn from `seed`.
    pub fn curriculum(&self, name: &str, seed: u64) -> Result<Curriculum, TaskError> {
        if name == "random" {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(RANDOM_STREAM);
            return Ok(make_random_curriculum(&self.kb.rule_ids(), RANDOM_STAGES, &mut rng)?);
        }
        self.curricula
            .get(name)
            .cloned()
            .ok_or_else(|| TaskError::UnknownCurriculum { task: self.kind, name: name.to_string() })
    }

    /// Knowledge base, queries and every fixed curriculum agree.
    pub fn validate(&self) -> Result<(), TaskError> {
        validate_kb(&self.kb).map_err(TaskError::Invalid)?;
        self.queries.validate(&self.kb.groundings).map_err(TaskError::Invalid)?;
        for c in self.curricula.values() {
            c.validate(&self.kb)?;
        }
        Ok(())
    }
}

/// RNG stream reserved for random-curriculum draws.
const RANDOM_STREAM: u64 = 3;
/// RNG stream reserved for synthetic data.
pub(crate) const DATA_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TaskError {
    #[error("unknown task `{0}` (expected pet or sf)")]
    UnknownTask(String),
    #[error("task {task} has no curriculum named `{name}`")]
    UnknownCurriculum { task: TaskKind, name: String },
    #[error("invalid task configuration: {0}")]
    Config(String),
    #[error("{}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<ValidationError>),
    #[error(transparent)]
    Grounding(#[from] ValidationError),
    #[error(transparent)]
    Parse(#[from] KbParseError),
    #[error(transparent)]
    Curriculum(#[from] CurriculumError),
    #[error(transparent)]
    Facts(#[from] FactsError),
}

pub(crate) fn query_set(entries: &[(&str, &str)]) -> QuerySet {
    let mut q = QuerySet::new();
    for (id, text) in entries {
        q.push(*id, parse_formula(text).expect("built-in query parses"));
    }
    q
}

pub(crate) fn shipped_curricula(files: &[(&str, &str)]) -> BTreeMap<String, Curriculum> {
    files
        .iter()
        .map(|(name, text)| {
            (name.to_string(), Curriculum::parse(name, text).expect("shipped curriculum parses"))
        })
        .collect()
}
