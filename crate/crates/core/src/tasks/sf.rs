use std::collections::BTreeMap;

use crate::autodiff::DenseNetwork;
use crate::curriculum::{Curriculum, QuerySet};
use crate::fol::{parse_kb, GroundingTable};

use super::{shipped_curricula, SfFacts, TaskBundle, TaskError, TaskKind, DEFAULT_HIDDEN};

/// Rule file of smokers & friends.
pub const SF_KB: &str = include_str!("../../data/sf.kb");

const CURRICULA: [(&str, &str); 3] = [
    ("baseline", include_str!("../../data/sf_baseline.curriculum")),
    ("kc", include_str!("../../data/sf_kc.curriculum")),
    ("ts", include_str!("../../data/sf_ts.curriculum")),
];

/// The fourteen persons, in two friendship groups `a..h` and `i..n`.
pub const PERSONS: [char; 14] = ['a', 'b', 'c', 'd', 'e', 'f', 'g', 'h', 'i', 'j', 'k', 'l', 'm', 'n'];

pub(crate) fn group_of(p: char) -> u8 {
    if p <= 'h' {
        0
    } else {
        1
    }
}

fn index_of(p: char) -> usize {
    PERSONS.iter().position(|&q| q == p).expect("validated person")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SfConfig {
    pub embedding_dim: usize,
    pub hidden: Vec<usize>,
    pub facts: SfFacts,
    pub seed: u64,
}

impl Default for SfConfig {
    fn default() -> Self {
        Self { embedding_dim: 8, hidden: DEFAULT_HIDDEN.to_vec(), facts: SfFacts::default(), seed: 0 }
    }
}

/// Persons as trainable embeddings; `F` reads two concatenated embeddings,
/// `S` and `C` one. Embeddings and networks start at zero here and are drawn
/// from the seed when a curriculum run begins.
pub fn build_sf(cfg: &SfConfig) -> Result<TaskBundle, TaskError> {
    if cfg.embedding_dim == 0 {
        return Err(TaskError::Config("embedding_dim must be positive".into()));
    }
    let facts = &cfg.facts;
    let mut g = GroundingTable::new();
    g.add_domain("persons", vec![vec![0.0; cfg.embedding_dim]; PERSONS.len()], true)?;
    let all: Vec<usize> = (0..PERSONS.len()).collect();
    g.add_partition("x", "persons", all.clone())?;
    g.add_partition("y", "persons", all)?;

    let idx = |ps: &[char]| ps.iter().map(|&p| index_of(p)).collect::<Vec<_>>();
    let (fx, fy): (Vec<char>, Vec<char>) = facts.friends.iter().copied().unzip();
    let (sx, sy): (Vec<char>, Vec<char>) = facts.non_friends().into_iter().unzip();
    g.add_partition("Friends_x", "persons", idx(&fx))?;
    g.add_partition("Friends_y", "persons", idx(&fy))?;
    g.add_partition("Strangers_x", "persons", idx(&sx))?;
    g.add_partition("Strangers_y", "persons", idx(&sy))?;
    g.link(&["Friends_x", "Friends_y"])?;
    g.link(&["Strangers_x", "Strangers_y"])?;
    g.add_partition("Smokers", "persons", idx(&facts.smokes))?;
    g.add_partition("Nonsmokers", "persons", idx(&facts.non_smokers()))?;
    g.add_partition("Cancer", "persons", idx(&facts.cancer))?;
    g.add_partition("No_Cancer", "persons", idx(&facts.not_cancer))?;

    let net = |input: usize| {
        DenseNetwork::zeros(input, &cfg.hidden).map_err(|e| TaskError::Config(e.to_string()))
    };
    g.add_predicate("F", 2, net(2 * cfg.embedding_dim)?);
    g.add_predicate("S", 1, net(cfg.embedding_dim)?);
    g.add_predicate("C", 1, net(cfg.embedding_dim)?);

    let kb = parse_kb(SF_KB)?.with_groundings(g);
    let mut queries = QuerySet::new();
    for r in kb.rules() {
        queries.push(r.id.clone(), r.formula.clone());
    }
    let bundle = TaskBundle { kind: TaskKind::Sf, kb, curricula: sf_curricula(), queries };
    bundle.validate()?;
    Ok(bundle)
}

/// The fixed curricula: `baseline`, `kc` and `ts`.
pub fn sf_curricula() -> BTreeMap<String, Curriculum> {
    shipped_curricula(&CURRICULA)
}
