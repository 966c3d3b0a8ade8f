use crate::autodiff::Eval;

use super::{connectives, ConnectiveConfig, LogicError, DEFAULT_EPS};

/// A fuzzy truth value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct TruthValue(f64);

impl TruthValue {
    pub const FALSE: TruthValue = TruthValue(0.0);
    pub const TRUE: TruthValue = TruthValue(1.0);

    pub fn new(value: f64) -> Result<Self, LogicError> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(LogicError::OutOfRange(value))
        }
    }

    /// Clamps into `[0, 1]`; rounding can push connective results a few ulps
    /// outside the interval. NaN is rejected by `new` and maps to 0 here.
    pub(crate) fn saturating(value: f64) -> Self {
        if value.is_nan() {
            Self(0.0)
        } else {
            Self(value.clamp(0.0, 1.0))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<TruthValue> for f64 {
    fn from(t: TruthValue) -> f64 {
        t.0
    }
}

pub fn fuzzy_not(a: TruthValue) -> TruthValue {
    TruthValue::saturating(connectives::not(&mut Eval, a.0))
}

pub fn fuzzy_and(a: TruthValue, b: TruthValue) -> TruthValue {
    TruthValue::saturating(connectives::and(&mut Eval, a.0, b.0))
}

pub fn fuzzy_or(a: TruthValue, b: TruthValue) -> TruthValue {
    TruthValue::saturating(connectives::or(&mut Eval, a.0, b.0))
}

pub fn fuzzy_implies(a: TruthValue, b: TruthValue) -> TruthValue {
    TruthValue::saturating(connectives::implies(&mut Eval, a.0, b.0))
}

fn check(values: &[TruthValue], p: f64) -> Result<Vec<f64>, LogicError> {
    if values.is_empty() {
        return Err(LogicError::EmptyAggregation);
    }
    if !(p >= 1.0) {
        return Err(LogicError::InvalidExponent(p));
    }
    Ok(values.iter().map(|v| v.0).collect())
}

/// Universal aggregation (p-mean error).
pub fn agg_forall(values: &[TruthValue], p: f64) -> Result<TruthValue, LogicError> {
    let xs = check(values, p)?;
    Ok(TruthValue::saturating(connectives::forall(&mut Eval, &xs, p, DEFAULT_EPS)))
}

/// Existential aggregation (p-mean).
pub fn agg_exists(values: &[TruthValue], p: f64) -> Result<TruthValue, LogicError> {
    let xs = check(values, p)?;
    Ok(TruthValue::saturating(connectives::exists(&mut Eval, &xs, p, DEFAULT_EPS)))
}

/// Satisfiability of a set of rule truth values.
pub fn kb_sat(rule_sats: &[TruthValue], cfg: &ConnectiveConfig) -> Result<TruthValue, LogicError> {
    let xs = check(rule_sats, cfg.p_kb)?;
    Ok(TruthValue::saturating(connectives::forall(&mut Eval, &xs, cfg.p_kb, cfg.eps)))
}

/// Training loss `1 − sat`.
pub fn loss(sat: TruthValue) -> f64 {
    1.0 - sat.0
}
