//! Fuzzy connectives and aggregators: exhaustive grid checks at step 0.1
//! plus randomized properties.

use continual_reasoning::logic::{
    agg_exists, agg_forall, fuzzy_and, fuzzy_implies, fuzzy_not, fuzzy_or, kb_sat, loss, ConnectiveConfig,
    TruthValue,
};
use proptest::prelude::*;

const EXPONENTS: [f64; 4] = [1.0, 2.0, 3.5, 8.0];
// aggregator results carry the 1e-7 guard; exact connectives get a few ulps
const AGG_TOL: f64 = 1e-6;
const ULPS: f64 = 1e-12;

fn grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

fn tv(x: f64) -> TruthValue {
    TruthValue::new(x).unwrap()
}

fn binary_ops() -> [(&'static str, fn(TruthValue, TruthValue) -> TruthValue); 3] {
    [("and", fuzzy_and), ("or", fuzzy_or), ("implies", fuzzy_implies)]
}

#[test]
pub fn connectives_stay_in_unit_interval() {
    for a in grid() {
        let n = fuzzy_not(tv(a)).value();
        assert!((0.0..=1.0).contains(&n));
        for b in grid() {
            for (name, op) in binary_ops() {
                let r = op(tv(a), tv(b)).value();
                assert!((0.0..=1.0).contains(&r), "{name}({a}, {b}) = {r}");
            }
        }
    }
}

#[test]
pub fn aggregators_stay_in_unit_interval() {
    let g = grid();
    for &a in &g {
        for &b in &g {
            for &c in &g {
                let xs = [tv(a), tv(b), tv(c)];
                for p in EXPONENTS {
                    for r in [agg_forall(&xs, p).unwrap(), agg_exists(&xs, p).unwrap()] {
                        assert!((0.0..=1.0).contains(&r.value()), "{xs:?} p={p}");
                    }
                }
            }
        }
    }
}

#[test]
pub fn boolean_truth_tables() {
    let b = |x: bool| if x { 1.0 } else { 0.0 };
    for x in [false, true] {
        assert_eq!(fuzzy_not(tv(b(x))).value(), b(!x));
        for y in [false, true] {
            assert_eq!(fuzzy_and(tv(b(x)), tv(b(y))).value(), b(x && y), "and {x} {y}");
            assert_eq!(fuzzy_or(tv(b(x)), tv(b(y))).value(), b(x || y), "or {x} {y}");
            assert_eq!(fuzzy_implies(tv(b(x)), tv(b(y))).value(), b(!x || y), "implies {x} {y}");
        }
    }
}

#[test]
pub fn aggregators_agree_with_quantifiers_on_booleans() {
    // every Boolean list of length 1..=4
    for n in 1..=4usize {
        for mask in 0..(1u32 << n) {
            let bits: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            let xs: Vec<TruthValue> = bits.iter().map(|&t| tv(if t { 1.0 } else { 0.0 })).collect();
            let all = bits.iter().all(|&t| t);
            let any = bits.iter().any(|&t| t);
            for p in EXPONENTS {
                let f = agg_forall(&xs, p).unwrap().value();
                let e = agg_exists(&xs, p).unwrap().value();
                // a universal is fully true only if every element is, an
                // existential fully false only if none is
                assert_eq!(all, (f - 1.0).abs() <= AGG_TOL, "forall {bits:?} p={p}: {f}");
                assert_eq!(!any, e <= AGG_TOL, "exists {bits:?} p={p}: {e}");
                if n == 1 {
                    assert!((f - if all { 1.0 } else { 0.0 }).abs() <= AGG_TOL);
                    assert!((e - if any { 1.0 } else { 0.0 }).abs() <= AGG_TOL);
                }
            }
        }
    }
}

#[test]
pub fn connectives_are_monotone_on_grid() {
    let g = grid();
    for w in g.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        assert!(fuzzy_not(tv(hi)).value() <= fuzzy_not(tv(lo)).value());
        for &c in &g {
            // non-decreasing in each argument
            for (name, op) in [("and", fuzzy_and as fn(_, _) -> _), ("or", fuzzy_or)] {
                assert!(op(tv(lo), tv(c)).value() <= op(tv(hi), tv(c)).value() + ULPS, "{name} left");
                assert!(op(tv(c), tv(lo)).value() <= op(tv(c), tv(hi)).value() + ULPS, "{name} right");
            }
            // non-increasing in the antecedent, non-decreasing in the consequent
            assert!(fuzzy_implies(tv(hi), tv(c)).value() <= fuzzy_implies(tv(lo), tv(c)).value() + ULPS);
            assert!(fuzzy_implies(tv(c), tv(lo)).value() <= fuzzy_implies(tv(c), tv(hi)).value() + ULPS);
        }
    }
}

#[test]
pub fn aggregators_are_monotone_on_grid() {
    let g = grid();
    let cfg = ConnectiveConfig::default();
    for &a in &g {
        for &b in &g {
            for w in g.windows(2) {
                let low = [tv(a), tv(w[0]), tv(b)];
                let high = [tv(a), tv(w[1]), tv(b)];
                for p in EXPONENTS {
                    assert!(agg_forall(&low, p).unwrap() <= agg_forall(&high, p).unwrap());
                    assert!(agg_exists(&low, p).unwrap() <= agg_exists(&high, p).unwrap());
                }
                assert!(kb_sat(&low, &cfg).unwrap() <= kb_sat(&high, &cfg).unwrap());
            }
        }
    }
}

#[test]
pub fn aggregators_are_idempotent_on_constant_lists() {
    for c in grid() {
        for n in 1..=6 {
            let xs = vec![tv(c); n];
            for p in EXPONENTS {
                let f = agg_forall(&xs, p).unwrap().value();
                let e = agg_exists(&xs, p).unwrap().value();
                assert!((f - c).abs() <= AGG_TOL, "forall [{c}; {n}] p={p} = {f}");
                assert!((e - c).abs() <= AGG_TOL, "exists [{c}; {n}] p={p} = {e}");
            }
        }
    }
}

#[test]
pub fn worked_examples() {
    assert_eq!(fuzzy_and(tv(1.0), tv(0.7)).value(), 0.7);
    assert_eq!(fuzzy_or(tv(0.5), tv(0.5)).value(), 0.75);
    assert!((fuzzy_implies(tv(0.8), tv(0.5)).value() - 0.6).abs() < ULPS);
    let two = [tv(0.6), tv(0.8)];
    let expected = 1.0 - ((0.4f64.powi(2) + 0.2f64.powi(2)) / 2.0).sqrt();
    assert!((agg_forall(&two, 2.0).unwrap().value() - expected).abs() < ULPS);
    assert!((agg_exists(&[tv(0.0), tv(0.0), tv(1.0)], 2.0).unwrap().value() - (1.0f64 / 3.0).sqrt()).abs() < ULPS);
    let sat = kb_sat(&two, &ConnectiveConfig::default()).unwrap();
    assert!((loss(sat) - (1.0 - expected)).abs() < ULPS);
    assert!(agg_forall(&[], 2.0).is_err());
    assert!(agg_exists(&[], 2.0).is_err());
}

fn truth() -> impl Strategy<Value = f64> {
    0.0..=1.0f64
}

proptest! {
    #[test]
    fn prop_connectives_bounded(a in truth(), b in truth()) {
        for (_, op) in binary_ops() {
            let r = op(tv(a), tv(b)).value();
            prop_assert!((0.0..=1.0).contains(&r));
        }
    }

    #[test]
    fn prop_implies_boundaries(b in truth()) {
        prop_assert_eq!(fuzzy_implies(tv(0.0), tv(b)).value(), 1.0);
        prop_assert!((fuzzy_implies(tv(1.0), tv(b)).value() - b).abs() <= ULPS);
    }

    #[test]
    fn prop_and_or_are_dual(a in truth(), b in truth()) {
        let lhs = fuzzy_not(fuzzy_and(tv(a), tv(b))).value();
        let rhs = fuzzy_or(fuzzy_not(tv(a)), fuzzy_not(tv(b))).value();
        prop_assert!((lhs - rhs).abs() <= ULPS);
    }

    #[test]
    fn prop_exists_at_least_mean(xs in prop::collection::vec(truth(), 1..12), p in 1.0..10.0f64) {
        let tvs: Vec<TruthValue> = xs.iter().map(|&x| tv(x)).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        prop_assert!(agg_exists(&tvs, p).unwrap().value() >= mean - AGG_TOL);
    }

    #[test]
    fn prop_forall_at_most_mean_and_decreasing_in_p(
        xs in prop::collection::vec(truth(), 1..12),
        p in 1.0..10.0f64,
        dp in 0.0..5.0f64,
    ) {
        let tvs: Vec<TruthValue> = xs.iter().map(|&x| tv(x)).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let lo = agg_forall(&tvs, p).unwrap().value();
        prop_assert!(lo <= mean + AGG_TOL);
        prop_assert!(agg_forall(&tvs, p + dp).unwrap().value() <= lo + AGG_TOL);
    }

    #[test]
    fn prop_aggregators_monotone(
        xs in prop::collection::vec(truth(), 1..8),
        i in any::<prop::sample::Index>(),
        bump in 0.0..1.0f64,
        p in 1.0..6.0f64,
    ) {
        let k = i.index(xs.len());
        let mut ys = xs.clone();
        ys[k] = (ys[k] + bump).min(1.0);
        let a: Vec<TruthValue> = xs.iter().map(|&x| tv(x)).collect();
        let b: Vec<TruthValue> = ys.iter().map(|&x| tv(x)).collect();
        prop_assert!(agg_forall(&a, p).unwrap() <= agg_forall(&b, p).unwrap());
        prop_assert!(agg_exists(&a, p).unwrap() <= agg_exists(&b, p).unwrap());
    }

    #[test]
    fn prop_loss_strictly_decreases(
        xs in prop::collection::vec(0.0..0.99f64, 1..8),
        i in any::<prop::sample::Index>(),
        bump in 0.001..0.01f64,
    ) {
        let cfg = ConnectiveConfig::default();
        let k = i.index(xs.len());
        let mut ys = xs.clone();
        ys[k] += bump;
        let a: Vec<TruthValue> = xs.iter().map(|&x| tv(x)).collect();
        let b: Vec<TruthValue> = ys.iter().map(|&x| tv(x)).collect();
        let (la, lb) = (loss(kb_sat(&a, &cfg).unwrap()), loss(kb_sat(&b, &cfg).unwrap()));
        prop_assert!(lb < la, "{la} -> {lb}");
        prop_assert!((0.0..=1.0).contains(&la));
    }
}
