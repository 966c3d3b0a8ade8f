//! Differentiable fuzzy semantics: connectives, quantifier aggregators,
//! formula and knowledge-base satisfiability.

pub mod connectives;
mod sat;
mod truth;

pub use sat::{formula_sat, Evaluator};
pub use truth::{
    agg_exists, agg_forall, fuzzy_and, fuzzy_implies, fuzzy_not, fuzzy_or, kb_sat, loss, TruthValue,
};

use thiserror::Error;

/// Lower clamp applied before fractional powers in the aggregators.
pub const DEFAULT_EPS: f64 = 1e-7;

/// Aggregator exponents. Connectives are fixed: standard negation, product
/// t-norm, probabilistic sum and Reichenbach implication.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectiveConfig {
    pub p_forall: f64,
    pub p_exists: f64,
    pub p_kb: f64,
    pub eps: f64,
}

impl Default for ConnectiveConfig {
    fn default() -> Self {
        Self { p_forall: 2.0, p_exists: 2.0, p_kb: 2.0, eps: DEFAULT_EPS }
    }
}

impl ConnectiveConfig {
    /// Same exponent for every aggregator.
    pub fn with_p(p: f64) -> Self {
        Self { p_forall: p, p_exists: p, p_kb: p, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), LogicError> {
        for p in [self.p_forall, self.p_exists, self.p_kb] {
            if !(p >= 1.0) || !p.is_finite() {
                return Err(LogicError::InvalidExponent(p));
            }
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(LogicError::InvalidEps(self.eps));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LogicError {
    #[error("truth value {0} outside [0, 1]")]
    OutOfRange(f64),
    #[error("aggregation over an empty list")]
    EmptyAggregation,
    #[error("aggregator exponent must be a finite real >= 1, got {0}")]
    InvalidExponent(f64),
    #[error("clamp epsilon must lie in (0, 1), got {0}")]
    InvalidEps(f64),
    #[error("variable `{var}` in `{atom}` is unbound")]
    UnboundVariable { var: String, atom: String },
    #[error("unknown predicate `{predicate}` in `{atom}`")]
    UnknownPredicate { predicate: String, atom: String },
    #[error("no partition named `{0}`")]
    UnknownPartition(String),
    #[error("`{atom}` does not match predicate arity {expected}")]
    Arity { atom: String, expected: usize },
    #[error("`{atom}` provides {actual} input features, network expects {expected}")]
    InputDim { atom: String, expected: usize, actual: usize },
}
