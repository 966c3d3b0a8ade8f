//! Built-in task bundles: data sizes, rule texts, curricula and facts.

use std::collections::BTreeSet;

use continual_reasoning::curriculum::{run_curriculum, Curriculum, Stage, StageConfig};
use continual_reasoning::experiment::DEFAULT_LR;
use continual_reasoning::fol::parse_formula;
use continual_reasoning::logic::{formula_sat, ConnectiveConfig};
use continual_reasoning::tasks::{build_pet, build_sf, PetConfig, SfConfig, SfFacts, TaskBundle, TaskKind, PERSONS};

fn label_of<'a>(b: &'a TaskBundle, id: &str) -> &'a str {
    &b.kb.rule(id).unwrap().label
}

fn stage_labels(b: &TaskBundle, c: &Curriculum) -> Vec<BTreeSet<String>> {
    c.stages.iter().map(|s| s.rules.iter().map(|id| label_of(b, id).to_string()).collect()).collect()
}

fn partition_len(b: &TaskBundle, name: &str) -> usize {
    b.kb.groundings.partition(name).unwrap().len()
}

fn assert_covers_all_once(b: &TaskBundle, c: &Curriculum) {
    let ids = c.rule_ids();
    let set: BTreeSet<&str> = ids.iter().copied().collect();
    assert_eq!(ids.len(), set.len(), "{} repeats a rule", c.name);
    assert_eq!(set.len(), b.kb.rules().len(), "{} misses a rule", c.name);
}

#[test]
fn pet_partitions_have_the_configured_sizes() {
    let b = TaskKind::Pet.build(0).unwrap();
    assert_eq!(partition_len(&b, "Norm_Birds"), 100);
    assert_eq!(partition_len(&b, "Cows"), 100);
    assert_eq!(partition_len(&b, "Penguins"), 50);
    assert_eq!(partition_len(&b, "Animals"), 250);
    assert_eq!(partition_len(&b, "Non_Penguins"), 200);

    let g = &b.kb.groundings;
    let set = |n: &str| g.partition(n).unwrap().indices.iter().copied().collect::<BTreeSet<usize>>();
    let (birds, cows, penguins) = (set("Norm_Birds"), set("Cows"), set("Penguins"));
    assert!(birds.is_disjoint(&cows) && birds.is_disjoint(&penguins) && cows.is_disjoint(&penguins));
    let union: BTreeSet<usize> = birds.union(&cows).copied().collect();
    assert_eq!(set("Non_Penguins"), union);
    assert_eq!(set("Animals"), union.union(&penguins).copied().collect());
    assert_eq!(g.domain("animals").unwrap().len(), 250);
}

#[test]
fn pet_clusters_are_far_apart_and_reproducible() {
    let cfg = PetConfig { seed: 3, ..PetConfig::default() };
    let b = build_pet(&cfg).unwrap();
    let g = &b.kb.groundings;
    let centroid = |n: &str| {
        let rows = g.partition_rows(n).unwrap();
        let mut c = vec![0.0; cfg.feature_dim];
        for r in &rows {
            for (ci, x) in c.iter_mut().zip(r) {
                *ci += x / rows.len() as f64;
            }
        }
        c
    };
    let cs = [centroid("Norm_Birds"), centroid("Cows"), centroid("Penguins")];
    for i in 0..3 {
        for j in i + 1..3 {
            let d: f64 = cs[i].iter().zip(&cs[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            assert!(d >= 4.0 * cfg.cluster_std, "clusters {i},{j} only {d} apart");
        }
    }
    assert_eq!(build_pet(&cfg).unwrap().kb.groundings, *g);
    let other = build_pet(&PetConfig { seed: 4, ..PetConfig::default() }).unwrap();
    assert_ne!(other.kb.groundings, *g);
}

#[test]
fn pet_config_is_validated() {
    for bad in [
        PetConfig { n_cows: 0, ..PetConfig::default() },
        PetConfig { cluster_std: 0.0, ..PetConfig::default() },
        PetConfig { feature_dim: 2, ..PetConfig::default() },
        PetConfig { center_offset: 1.0, ..PetConfig::default() },
    ] {
        assert!(build_pet(&bad).is_err(), "{bad:?}");
    }
}

#[test]
fn pet_rules_and_queries() {
    let b = TaskKind::Pet.build(0).unwrap();
    assert_eq!(b.kb.rules().len(), 8);
    let eighth = &b.kb.rules()[7];
    assert_eq!(eighth.formula.to_string(), "forall Animals: is_penguin(Animals) => not can_fly(Animals)");
    assert_eq!(eighth.label, "penguins do not fly");
    assert_eq!(
        b.queries.ids(),
        ["is_bird(Normal_Birds)", "is_bird(Penguins)", "can_fly(Normal_Birds)", "not(can_fly(Penguins))"]
    );
    let preds: BTreeSet<&str> = b.kb.groundings.predicates().map(|(n, _)| n).collect();
    assert_eq!(preds, BTreeSet::from(["can_fly", "is_bird", "is_penguin"]));
}

#[test]
fn pet_curricula_contents() {
    let b = TaskKind::Pet.build(0).unwrap();
    assert_eq!(b.curriculum_names(), ["baseline", "kc", "ts", "random"]);
    let kc = b.curriculum("kc", 0).unwrap();
    let ts = b.curriculum("ts", 0).unwrap();
    let base = b.curriculum("baseline", 0).unwrap();
    assert_eq!(base.len(), 1);
    assert_eq!(kc.len(), 3);
    assert_eq!(ts.len(), 3);
    let n = |i: usize| b.kb.rules()[i - 1].id.clone();
    let ids = |c: &Curriculum, k: usize| c.stages[k].rules.iter().cloned().collect::<BTreeSet<_>>();
    let set = |xs: &[usize]| xs.iter().map(|&i| n(i)).collect::<BTreeSet<_>>();
    assert_eq!(ids(&kc, 0), set(&[1, 2, 5, 6]));
    assert_eq!(ids(&kc, 1), set(&[3, 4, 7]));
    assert_eq!(ids(&kc, 2), set(&[8]));
    assert_eq!(ids(&ts, 0), set(&[1, 2, 5, 6, 7]));
    assert_eq!(ids(&ts, 1), set(&[3, 4]));
    assert_eq!(ids(&ts, 2), set(&[8]));
    assert!(label_of(&b, &n(7)).contains("penguins are birds"));
    for name in b.curriculum_names() {
        assert_covers_all_once(&b, &b.curriculum(&name, 11).unwrap());
    }
}

#[test]
fn pet_penguin_probe_separates_clusters() {
    let mut b = TaskKind::Pet.build(0).unwrap();
    let c = Curriculum::new("probe", vec![Stage::new(["penguins_are_penguins", "nonpenguins_not_penguins"])]);
    let cfg = StageConfig { epochs: 400, lr: DEFAULT_LR, recall: 0.5, seed: 0 };
    let conn = ConnectiveConfig::default();
    run_curriculum(&mut b.kb, &c, &cfg, &conn, &b.queries, 0).unwrap();
    for id in ["penguins_are_penguins", "nonpenguins_not_penguins"] {
        let sat = formula_sat(&b.kb.rule(id).unwrap().formula, &b.kb.groundings, &conn).unwrap().value();
        assert!(sat >= 0.99, "{id}: {sat}");
    }
}

#[test]
fn sf_rules_labels_and_curricula() {
    let b = TaskKind::Sf.build(0).unwrap();
    assert_eq!(b.kb.rules().len(), 9);
    assert_eq!(b.queries.len(), 9);
    for r in b.kb.rules() {
        assert_eq!(b.queries.get(&r.id), Some(&r.formula));
    }
    let facts: Vec<&str> = b.kb.rules()[..3].iter().map(|r| r.label.as_str()).collect();
    assert_eq!(facts, ["identify known friendships", "identify known smokers", "identify known cancer"]);
    assert_eq!(
        b.kb.rule("has_friend").unwrap().formula,
        parse_formula("forall x: exists y: F(x, y)").unwrap()
    );

    let kc = b.curriculum("kc", 0).unwrap();
    let labels = stage_labels(&b, &kc);
    assert_eq!(
        labels[2],
        BTreeSet::from(["smokers have cancer".to_string(), "non-smokers don't have cancer".to_string()])
    );
    let ts = b.curriculum("ts", 0).unwrap();
    assert_eq!(ts.stages[0].rules.len(), 4);
    for id in &ts.stages[0].rules {
        let f = &b.kb.rule(id).unwrap().formula;
        assert!(f.atoms().iter().all(|(p, _)| *p == "F"), "{id} is not about friendship");
    }
    assert_eq!(ts.stages[1].rules.len(), 2);
    assert_eq!(ts.stages[2].rules.len(), 3);
    assert_eq!(kc.stages.iter().map(|s| s.rules.len()).collect::<Vec<_>>(), [3, 4, 2]);
    for name in b.curriculum_names() {
        assert_covers_all_once(&b, &b.curriculum(&name, 2).unwrap());
    }
}

#[test]
fn sf_antireflexivity_is_half_on_zero_networks() {
    let b = build_sf(&SfConfig::default()).unwrap();
    let f = parse_formula("forall x: not F(x, x)").unwrap();
    let sat = formula_sat(&f, &b.kb.groundings, &ConnectiveConfig::default()).unwrap().value();
    assert!((sat - 0.5).abs() < 1e-12, "{sat}");
}

#[test]
fn sf_groundings() {
    let b = TaskKind::Sf.build(0).unwrap();
    let g = &b.kb.groundings;
    let persons = g.domain("persons").unwrap();
    assert_eq!((persons.len(), persons.dim()), (14, 8));
    assert!(persons.is_trainable());
    assert_eq!(g.predicate("F").unwrap().network.input_dim(), 16);
    assert_eq!(g.predicate("S").unwrap().network.input_dim(), 8);
    assert_eq!(g.predicate("C").unwrap().network.input_dim(), 8);
    assert_eq!(partition_len(&b, "x"), 14);
    assert_eq!(partition_len(&b, "y"), 14);
    assert_eq!(partition_len(&b, "Friends_x"), 12);
    assert_eq!(partition_len(&b, "Smokers"), 6);
    assert_eq!(partition_len(&b, "Nonsmokers"), 8);
    assert_eq!(partition_len(&b, "Cancer"), 2);
    assert_eq!(partition_len(&b, "No_Cancer"), 6);
}

#[test]
fn shipped_facts_match_the_canonical_configuration() {
    let facts = SfFacts::default();
    let friends = [
        ('a', 'b'), ('a', 'e'), ('a', 'f'), ('a', 'g'), ('b', 'c'), ('c', 'd'),
        ('e', 'f'), ('g', 'h'), ('i', 'j'), ('j', 'm'), ('k', 'l'), ('m', 'n'),
    ];
    assert_eq!(facts.friends, friends);
    assert_eq!(facts.smokes, ['a', 'e', 'f', 'g', 'j', 'n']);
    assert_eq!(facts.cancer, ['a', 'e']);
    assert_eq!(facts.not_cancer, ['b', 'c', 'd', 'f', 'g', 'h']);
    assert!(facts.friends.iter().all(|(x, y)| x != y));

    // unordered same-group pairs not listed in either order
    let group = |p: char| p <= 'h';
    let mut expected = Vec::new();
    for (i, &x) in PERSONS.iter().enumerate() {
        for &y in &PERSONS[i + 1..] {
            if group(x) == group(y) && !friends.contains(&(x, y)) && !friends.contains(&(y, x)) {
                expected.push((x, y));
            }
        }
    }
    assert_eq!(expected.len(), 28 - 8 + 15 - 4);
    assert_eq!(facts.non_friends(), expected);
    assert_eq!(facts.non_smokers(), ['b', 'c', 'd', 'h', 'i', 'k', 'l', 'm']);
}

#[test]
fn facts_text_golden_and_round_trip() {
    let shipped = include_str!("../data/sf_facts.txt");
    let facts = SfFacts::parse(shipped).unwrap();
    let golden: String = shipped
        .lines()
        .filter(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty())
        .map(|l| format!("{l}\n"))
        .collect();
    assert_eq!(facts.to_text(), golden);
    assert_eq!(SfFacts::parse(&facts.to_text()).unwrap(), facts);
}

#[test]
fn malformed_facts_are_rejected_with_line_numbers() {
    for (text, line) in [
        ("friend a b\nfriend a a\n", 2),
        ("smokes z\n", 1),
        ("# c\nfriend a b\nfriend b a\n", 3),
        ("cancer a\nnot-cancer a\n", 2),
        ("friend a\n", 1),
        ("likes a b\n", 1),
    ] {
        let err = SfFacts::parse(text).unwrap_err();
        assert!(err.to_string().starts_with(&format!("line {line}:")), "{text:?}: {err}");
    }
}

#[test]
fn custom_facts_change_the_groundings() {
    let facts = SfFacts::parse("friend a b\nsmokes a\ncancer a\nnot-cancer b\n").unwrap();
    let b = build_sf(&SfConfig { facts, ..SfConfig::default() }).unwrap();
    assert_eq!(partition_len(&b, "Friends_x"), 1);
    assert_eq!(partition_len(&b, "Smokers"), 1);
    assert_eq!(partition_len(&b, "Nonsmokers"), 13);
}
