use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::autodiff::{AdamState, Eval, Graph, Tape};
use crate::fol::KnowledgeBase;
use crate::logic::{ConnectiveConfig, Evaluator, LogicError};

use super::{Curriculum, CurriculumError, QuerySet, Stage, StageConfig, TrainError, TrainingTrace};

/// Uniform sample without replacement of `⌈ρ·|prior|⌉` ids, returned in
/// prior order.
pub fn rehearsal_sample<R: Rng + ?Sized>(prior: &[String], recall: f64, rng: &mut R) -> Vec<String> {
    let recall = recall.clamp(0.0, 1.0);
    // the epsilon keeps e.g. 0.3 * 10 from rounding up to 4
    let k = ((recall * prior.len() as f64) - 1e-9).ceil().max(0.0) as usize;
    let k = k.min(prior.len());
    if k == prior.len() {
        return prior.to_vec();
    }
    let mut picked = index::sample(rng, prior.len(), k).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| prior[i].clone()).collect()
}

/// Shuffles the ids, then cuts them into `n_stages` non-empty groups at
/// uniformly chosen gaps.
pub fn make_random_curriculum<R: Rng + ?Sized>(
    rule_ids: &[String],
    n_stages: usize,
    rng: &mut R,
) -> Result<Curriculum, CurriculumError> {
    if n_stages == 0 || rule_ids.len() < n_stages {
        return Err(CurriculumError::TooFewRules { rules: rule_ids.len(), stages: n_stages });
    }
    let mut ids = rule_ids.to_vec();
    ids.shuffle(rng);
    let mut cuts = index::sample(rng, ids.len() - 1, n_stages - 1).into_vec();
    cuts.sort_unstable();
    let mut stages = Vec::with_capacity(n_stages);
    let mut start = 0;
    for cut in cuts.into_iter().map(|c| c + 1).chain([ids.len()]) {
        stages.push(Stage::new(ids[start..cut].iter().cloned()));
        start = cut;
    }
    Ok(Curriculum::new("random", stages))
}

/// Satisfiability of every query under the current parameters.
pub fn evaluate_queries(
    kb: &KnowledgeBase,
    queries: &QuerySet,
    connectives: &ConnectiveConfig,
) -> Result<Vec<(String, f64)>, LogicError> {
    let mut tape = Eval;
    let mut ev = Evaluator::new(&mut tape, &kb.groundings, connectives);
    queries
        .iter()
        .map(|(id, f)| Ok((id.to_string(), ev.formula_sat(f)?.clamp(0.0, 1.0))))
        .collect()
}

/// Trains one stage: every epoch the active rules are the stage rules plus a
/// fresh rehearsal sample of `prior`; one Adam step on `1 − kb_sat`, then the
/// queries are evaluated and appended to `trace` under `stage_index`.
#[allow(clippy::too_many_arguments)]
pub fn train_stage(
    kb: &mut KnowledgeBase,
    stage_rules: &[String],
    prior: &[String],
    cfg: &StageConfig,
    connectives: &ConnectiveConfig,
    queries: &QuerySet,
    trace: &mut TrainingTrace,
    stage_index: usize,
) -> Result<(), TrainError> {
    cfg.validate()?;
    connectives.validate()?;
    if stage_rules.is_empty() {
        return Err(CurriculumError::EmptyStage { stage: stage_index }.into());
    }
    for id in stage_rules.iter().chain(prior) {
        if kb.rule(id).is_none() {
            return Err(CurriculumError::UnknownRule { stage: stage_index, id: id.clone() }.into());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut adam = AdamState::new(kb.groundings.param_count(), cfg.lr);
    let mut values = kb.groundings.params();
    let mut graph = Graph::new();
    trace.begin_stage();
    for _ in 0..cfg.epochs {
        let mut active: Vec<String> = stage_rules.to_vec();
        active.extend(rehearsal_sample(prior, cfg.recall, &mut rng));

        graph.clear();
        let (loss, params, rule_sats) = {
            let mut ev = Evaluator::new(&mut graph, &kb.groundings, connectives);
            let mut sats = Vec::with_capacity(active.len());
            for id in &active {
                let rule = kb.rule(id).expect("checked above");
                sats.push(ev.formula_sat(&rule.formula)?);
            }
            let sat = ev.kb_sat(&sats)?;
            let loss = ev.tape().one_minus(sat);
            let rule_sats: Vec<(String, f64)> =
                active.iter().zip(&sats).map(|(id, &s)| (id.clone(), ev.value(s))).collect();
            (loss, ev.parameters().to_vec(), rule_sats)
        };
        if !graph.get(loss).is_finite() {
            return Err(TrainError::NonFinite { stage: stage_index, epoch: trace.next_epoch(), rule_sats });
        }
        let grads = graph.backward(loss)?;
        let g: Vec<f64> = params.iter().map(|&p| grads.wrt(p)).collect();
        if g.iter().any(|x| !x.is_finite()) {
            return Err(TrainError::NonFinite { stage: stage_index, epoch: trace.next_epoch(), rule_sats });
        }
        adam.update(&mut values, &g)?;
        kb.groundings.set_params(&values)?;

        let sats = evaluate_queries(kb, queries, connectives)?;
        trace.push(stage_index, sats.into_iter().map(|(_, s)| s).collect());
    }
    Ok(())
}

/// Result of a full curriculum run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub trace: TrainingTrace,
    /// Query values at the end of the run, in query-set order.
    pub final_sats: Vec<(String, f64)>,
}

impl RunOutcome {
    pub fn final_sat(&self, query: &str) -> Option<f64> {
        self.final_sats.iter().find(|(q, _)| q == query).map(|&(_, s)| s)
    }
}

/// Seed of the rehearsal sampler for a 1-based stage.
fn stage_seed(seed: u64, stage: usize) -> u64 {
    seed ^ (stage as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Reinitializes all parameters from `seed`, then trains the stages in
/// order. Earlier stages' rules (minus those of the current stage) form the
/// rehearsal pool.
pub fn run_curriculum(
    kb: &mut KnowledgeBase,
    curriculum: &Curriculum,
    defaults: &StageConfig,
    connectives: &ConnectiveConfig,
    queries: &QuerySet,
    seed: u64,
) -> Result<RunOutcome, TrainError> {
    curriculum.validate(kb)?;
    kb.groundings.reinitialize(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut trace = TrainingTrace::new(queries);
    let mut seen: Vec<String> = Vec::new();
    for (i, stage) in curriculum.stages.iter().enumerate() {
        let k = i + 1;
        let mut cfg = stage.overrides.apply(defaults);
        cfg.seed = stage_seed(seed, k);
        let prior: Vec<String> = seen.iter().filter(|id| !stage.rules.contains(id)).cloned().collect();
        train_stage(kb, &stage.rules, &prior, &cfg, connectives, queries, &mut trace, k)?;
        for id in &stage.rules {
            if !seen.contains(id) {
                seen.push(id.clone());
            }
        }
    }
    let final_sats = evaluate_queries(kb, queries, connectives)?;
    Ok(RunOutcome { trace, final_sats })
}
