//! Rehearsal sampling, curriculum construction and the stage-wise training
//! loop.

use std::collections::BTreeSet;

use continual_reasoning::autodiff::{Activation, DenseNetwork, Layer};
use continual_reasoning::curriculum::{
    evaluate_queries, make_random_curriculum, rehearsal_sample, run_curriculum, train_stage, Curriculum, QuerySet,
    Stage, StageConfig, StageOverrides, TrainError, TrainingTrace,
};
use continual_reasoning::experiment::DEFAULT_LR;
use continual_reasoning::fol::{parse_kb, parse_formula, GroundingTable, KnowledgeBase};
use continual_reasoning::logic::ConnectiveConfig;
use continual_reasoning::tasks::{build_pet, PetConfig, TaskBundle, TaskKind};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("r{i}")).collect()
}

fn small_pet(seed: u64) -> TaskBundle {
    build_pet(&PetConfig { n_norm_birds: 30, n_cows: 30, n_penguins: 15, seed, ..PetConfig::default() }).unwrap()
}

fn cfg(epochs: usize, recall: f64) -> StageConfig {
    StageConfig { epochs, lr: DEFAULT_LR, recall, seed: 0 }
}

#[test]
fn rehearsal_sample_is_uniform() {
    let prior = ids(4);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut counts = [0usize; 4];
    const DRAWS: usize = 10_000;
    for _ in 0..DRAWS {
        let sample = rehearsal_sample(&prior, 0.5, &mut rng);
        assert_eq!(sample.len(), 2);
        assert_ne!(sample[0], sample[1]);
        for id in &sample {
            counts[prior.iter().position(|p| p == id).unwrap()] += 1;
        }
    }
    // each rule is drawn with probability 1/2: mean 5000, 3σ = 150
    for (i, &c) in counts.iter().enumerate() {
        assert!((4850..=5150).contains(&c), "rule {i} drawn {c} times");
    }
}

#[test]
fn rehearsal_sample_edge_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert!(rehearsal_sample(&[], 0.7, &mut rng).is_empty());
    assert_eq!(rehearsal_sample(&ids(5), 1.0, &mut rng), ids(5));
    assert!(rehearsal_sample(&ids(5), 0.0, &mut rng).is_empty());
    // 0.3 · 10 must not round up to 4
    assert_eq!(rehearsal_sample(&ids(10), 0.3, &mut rng).len(), 3);
    assert_eq!(rehearsal_sample(&ids(7), 0.25, &mut rng).len(), 2);
}

proptest! {
    #[test]
    fn prop_rehearsal_size_and_order(n in 0usize..20, recall in 0.0..=1.0f64, seed in any::<u64>()) {
        let prior = ids(n);
        let sample = rehearsal_sample(&prior, recall, &mut ChaCha8Rng::seed_from_u64(seed));
        let expected = ((recall * n as f64) - 1e-9).ceil().max(0.0) as usize;
        prop_assert_eq!(sample.len(), expected.min(n));
        // a subsequence of the prior list: distinct and in prior order
        let positions: Vec<usize> = sample.iter().map(|s| prior.iter().position(|p| p == s).unwrap()).collect();
        prop_assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn prop_random_curriculum_partitions_rules(n in 3usize..15, stages in 1usize..4, seed in any::<u64>()) {
        let rules = ids(n);
        let c = make_random_curriculum(&rules, stages, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(c.len(), stages);
        prop_assert!(c.stages.iter().all(|s| !s.rules.is_empty()));
        let flat: Vec<&str> = c.rule_ids();
        prop_assert_eq!(flat.len(), n);
        let set: BTreeSet<&str> = flat.into_iter().collect();
        let all: BTreeSet<&str> = rules.iter().map(String::as_str).collect();
        prop_assert_eq!(set, all);
    }
}

#[test]
fn random_curriculum_over_pet_rules() {
    let bundle = TaskKind::Pet.build(0).unwrap();
    let rules = bundle.kb.rule_ids();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut shapes = BTreeSet::new();
    for _ in 0..200 {
        let c = make_random_curriculum(&rules, 3, &mut rng).unwrap();
        c.validate(&bundle.kb).unwrap();
        assert_eq!(c.rule_ids().len(), 8);
        shapes.insert(c.stages.iter().map(|s| s.rules.len()).collect::<Vec<_>>());
    }
    // all C(7, 2) = 21 stage-size compositions of 8 into 3 show up
    assert_eq!(shapes.len(), 21);
    assert!(make_random_curriculum(&ids(2), 3, &mut rng).is_err());
}

#[test]
fn zero_networks_give_half_on_every_query() {
    let bundle = TaskKind::Pet.build(3).unwrap();
    for (q, s) in evaluate_queries(&bundle.kb, &bundle.queries, &ConnectiveConfig::default()).unwrap() {
        assert!((s - 0.5).abs() < 1e-12, "{q}: {s}");
    }
}

#[test]
fn trace_has_epochs_records_per_stage_and_query() {
    let mut bundle = small_pet(1);
    let mut c = bundle.curriculum("ts", 1).unwrap();
    c.stages[1].overrides = StageOverrides { epochs: Some(7), ..StageOverrides::default() };
    let out = run_curriculum(&mut bundle.kb, &c, &cfg(5, 0.5), &ConnectiveConfig::default(), &bundle.queries, 1)
        .unwrap();
    let t = &out.trace;
    assert_eq!(t.stage_count(), 3);
    assert_eq!(t.boundaries(), &[0, 5, 12]);
    assert_eq!(t.rows().len(), 5 + 7 + 5);
    assert_eq!(t.records().count(), (5 + 7 + 5) * 4);
    for (k, n) in [(1, 5), (2, 7), (3, 5)] {
        assert_eq!(t.stage_rows(k).len(), n);
    }
    assert!(t.rows().windows(2).all(|w| w[1].epoch == w[0].epoch + 1));
    assert!(t.rows().iter().flat_map(|r| &r.sats).all(|s| (0.0..=1.0).contains(s)));
    // the final values are the last trace row
    let last: Vec<f64> = out.final_sats.iter().map(|(_, s)| *s).collect();
    assert_eq!(t.stage_end(3).unwrap(), last.as_slice());
}

#[test]
fn satisfied_stage_leaves_parameters_unchanged() {
    // a saturated sigmoid probe: every atom evaluates to exactly 1
    let mut layer = Layer::zeros(1, 1, Activation::Sigmoid);
    layer.bias[0] = 50.0;
    let mut g = GroundingTable::new();
    g.add_domain("d", vec![vec![0.3], vec![-1.2], vec![2.0]], false).unwrap();
    g.add_partition("X", "d", vec![0, 1, 2]).unwrap();
    g.add_predicate("P", 1, DenseNetwork::from_layers(vec![layer]).unwrap());
    let mut kb = parse_kb("all_p : forall X: P(X)\n").unwrap().with_groundings(g);
    let before = kb.groundings.params();
    let queries = QuerySet::new().with("all_p", parse_formula("forall X: P(X)").unwrap());
    let mut trace = TrainingTrace::new(&queries);
    train_stage(&mut kb, &["all_p".into()], &[], &cfg(20, 0.5), &ConnectiveConfig::default(), &queries, &mut trace, 1)
        .unwrap();
    assert_eq!(kb.groundings.params(), before);
    assert_eq!(trace.rows().len(), 20);
}

#[test]
fn same_seed_same_run() {
    let run = |seed| {
        let mut bundle = small_pet(4);
        let c = bundle.curriculum("random", seed).unwrap();
        run_curriculum(&mut bundle.kb, &c, &cfg(15, 0.5), &ConnectiveConfig::default(), &bundle.queries, seed)
            .unwrap()
    };
    assert_eq!(run(9), run(9));
    assert_ne!(run(9).trace, run(10).trace);
}

#[test]
fn full_recall_does_not_regress_learned_rules() {
    let mut bundle = small_pet(2);
    let learned = ["normal_birds_are_birds", "cows_not_birds", "penguins_are_penguins", "nonpenguins_not_penguins"];
    let c = Curriculum::new(
        "recall_all",
        vec![Stage::new(learned), Stage::new(["birds_fly", "nonbirds_dont_fly", "normal_birds_are_birds"])],
    );
    let mut queries = QuerySet::new();
    for id in learned {
        queries.push(id, bundle.kb.rule(id).unwrap().formula.clone());
    }
    let out =
        run_curriculum(&mut bundle.kb, &c, &cfg(200, 1.0), &ConnectiveConfig::default(), &queries, 2).unwrap();
    let (s1, s2) = (out.trace.stage_end(1).unwrap(), out.trace.stage_end(2).unwrap());
    for (k, id) in learned.iter().enumerate() {
        assert!(s2[k] >= s1[k] - 0.05, "{id}: {} -> {}", s1[k], s2[k]);
    }
}

#[test]
fn pet_fact_stage_learns_bird_classes() {
    let mut bundle = TaskKind::Pet.build(0).unwrap();
    let c = bundle.curriculum("ts", 0).unwrap();
    let stage1 = Curriculum::new("ts_stage1", vec![c.stages[0].clone()]);
    assert_eq!(stage1.stages[0].rules.len(), 5);
    let out = run_curriculum(&mut bundle.kb, &stage1, &cfg(400, 0.5), &ConnectiveConfig::default(), &bundle.queries, 0)
        .unwrap();
    assert!(out.final_sat("is_bird(Normal_Birds)").unwrap() >= 0.99, "{:?}", out.final_sats);
    assert!(out.final_sat("is_bird(Penguins)").unwrap() >= 0.99, "{:?}", out.final_sats);
}

#[test]
fn invalid_stage_inputs_are_rejected() {
    let mut bundle = small_pet(0);
    let conn = ConnectiveConfig::default();
    let mut trace = TrainingTrace::new(&bundle.queries);
    let unknown = train_stage(&mut bundle.kb, &["nope".into()], &[], &cfg(1, 0.5), &conn, &bundle.queries, &mut trace, 1);
    assert!(matches!(unknown, Err(TrainError::Curriculum(_))));
    let bad_lr = StageConfig { lr: 0.0, ..cfg(1, 0.5) };
    let r = train_stage(&mut bundle.kb, &["birds_fly".into()], &[], &bad_lr, &conn, &bundle.queries, &mut trace, 1);
    assert!(matches!(r, Err(TrainError::Config(_))));
    let bad_recall = StageConfig { recall: 1.5, ..cfg(1, 0.5) };
    assert!(bad_recall.validate().is_err());
    let empty = Curriculum::new("empty", vec![Stage::new(Vec::<String>::new())]);
    assert!(empty.validate(&bundle.kb).is_err());
}

#[test]
fn nonfinite_loss_aborts_with_rule_values() {
    let mut g = GroundingTable::new();
    g.add_domain("d", vec![vec![f64::NAN]], false).unwrap();
    g.add_partition("X", "d", vec![0]).unwrap();
    g.add_predicate("P", 1, DenseNetwork::zeros(1, &[2]).unwrap());
    let mut kb: KnowledgeBase = parse_kb("nan_rule : forall X: P(X)\n").unwrap().with_groundings(g);
    kb.groundings.reinitialize(&mut ChaCha8Rng::seed_from_u64(0));
    let queries = QuerySet::new();
    let mut trace = TrainingTrace::new(&queries);
    let err = train_stage(&mut kb, &["nan_rule".into()], &[], &cfg(3, 0.5), &ConnectiveConfig::default(), &queries, &mut trace, 2)
        .unwrap_err();
    match err {
        TrainError::NonFinite { stage, epoch, rule_sats } => {
            assert_eq!((stage, epoch), (2, 0));
            assert_eq!(rule_sats.len(), 1);
            assert_eq!(rule_sats[0].0, "nan_rule");
        }
        other => panic!("unexpected {other:?}"),
    }
}
