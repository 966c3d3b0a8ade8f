//! Recursive evaluation of formulas over groundings.

use std::collections::HashMap;

use crate::autodiff::{Eval, Tape};
use crate::fol::{Formula, GroundingTable};

use super::{connectives, ConnectiveConfig, LogicError, TruthValue};

#[derive(Debug, Clone, Copy)]
struct Bound<'f> {
    var: &'f str,
    pos: usize,
}

/// Evaluates formulas on a tape with every trainable parameter of the
/// grounding table bound once, in canonical order.
///
/// Atom values are memoized per (predicate, individuals), so an atom shared
/// by several rules is computed once and its gradient accumulates.
pub struct Evaluator<'a, T: Tape> {
    tape: &'a mut T,
    groundings: &'a GroundingTable,
    cfg: ConnectiveConfig,
    params: Vec<T::Value>,
    predicate_params: HashMap<&'a str, (usize, usize)>,
    /// Row handles of trainable domains, indexed like the domain rows.
    trainable_rows: HashMap<&'a str, Vec<Vec<T::Value>>>,
    constant_rows: HashMap<(&'a str, usize), Vec<T::Value>>,
    atoms: HashMap<(&'a str, Vec<(&'a str, usize)>), T::Value>,
}

impl<'a, T: Tape> Evaluator<'a, T> {
    pub fn new(tape: &'a mut T, groundings: &'a GroundingTable, cfg: &ConnectiveConfig) -> Self {
        let values = groundings.params();
        let params: Vec<T::Value> = values.iter().map(|&v| tape.parameter(v)).collect();
        let mut predicate_params = HashMap::new();
        let mut offset = 0;
        for (name, p) in groundings.predicates() {
            let n = p.network.param_count();
            predicate_params.insert(name, (offset, offset + n));
            offset += n;
        }
        let mut trainable_rows = HashMap::new();
        for (name, d) in groundings.domains().filter(|(_, d)| d.is_trainable()) {
            let rows = (0..d.len())
                .map(|r| {
                    let start = offset + r * d.dim();
                    params[start..start + d.dim()].to_vec()
                })
                .collect();
            offset += d.len() * d.dim();
            trainable_rows.insert(name, rows);
        }
        debug_assert_eq!(offset, params.len());
        Self {
            tape,
            groundings,
            cfg: *cfg,
            params,
            predicate_params,
            trainable_rows,
            constant_rows: HashMap::new(),
            atoms: HashMap::new(),
        }
    }

    /// Parameter handles in the order of [`GroundingTable::params`].
    pub fn parameters(&self) -> &[T::Value] {
        &self.params
    }

    pub fn config(&self) -> &ConnectiveConfig {
        &self.cfg
    }

    pub fn tape(&mut self) -> &mut T {
        self.tape
    }

    pub fn value(&self, v: T::Value) -> f64 {
        self.tape.value(v)
    }

    /// Truth value of a closed formula.
    pub fn formula_sat(&mut self, f: &'a Formula) -> Result<T::Value, LogicError> {
        let mut env = Vec::new();
        self.eval(f, &mut env)
    }

    /// Aggregated satisfiability of several rule values.
    pub fn kb_sat(&mut self, rule_sats: &[T::Value]) -> Result<T::Value, LogicError> {
        if rule_sats.is_empty() {
            return Err(LogicError::EmptyAggregation);
        }
        Ok(connectives::forall(self.tape, rule_sats, self.cfg.p_kb, self.cfg.eps))
    }

    fn eval(&mut self, f: &'a Formula, env: &mut Vec<Bound<'a>>) -> Result<T::Value, LogicError> {
        match f {
            Formula::Atom { predicate, args } => self.atom(f, predicate, args, env),
            Formula::Not(a) => {
                let a = self.eval(a, env)?;
                Ok(connectives::not(self.tape, a))
            }
            Formula::And(a, b) => {
                let (a, b) = (self.eval(a, env)?, self.eval(b, env)?);
                Ok(connectives::and(self.tape, a, b))
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.eval(a, env)?, self.eval(b, env)?);
                Ok(connectives::or(self.tape, a, b))
            }
            Formula::Implies(a, b) => {
                let (a, b) = (self.eval(a, env)?, self.eval(b, env)?);
                Ok(connectives::implies(self.tape, a, b))
            }
            Formula::ForAll { var, body } | Formula::Exists { var, body } => {
                let universal = matches!(f, Formula::ForAll { .. });
                let partition = self
                    .groundings
                    .partition(var)
                    .ok_or_else(|| LogicError::UnknownPartition(var.clone()))?;
                let fixed = self
                    .groundings
                    .linked_with(var)
                    .find_map(|linked| env.iter().rev().find(|b| b.var == linked).map(|b| b.pos));
                if let Some(pos) = fixed {
                    env.push(Bound { var, pos });
                    let v = self.eval(body, env);
                    env.pop();
                    return v;
                }
                let mut values = Vec::with_capacity(partition.len());
                for pos in 0..partition.len() {
                    env.push(Bound { var, pos });
                    let v = self.eval(body, env);
                    env.pop();
                    values.push(v?);
                }
                Ok(if universal {
                    connectives::forall(self.tape, &values, self.cfg.p_forall, self.cfg.eps)
                } else {
                    connectives::exists(self.tape, &values, self.cfg.p_exists, self.cfg.eps)
                })
            }
        }
    }

    fn atom(
        &mut self,
        f: &Formula,
        predicate: &'a str,
        args: &'a [String],
        env: &[Bound<'a>],
    ) -> Result<T::Value, LogicError> {
        let g = self.groundings;
        let mut individuals = Vec::with_capacity(args.len());
        for arg in args {
            let bound = env.iter().rev().find(|b| b.var == arg).ok_or_else(|| {
                LogicError::UnboundVariable { var: arg.clone(), atom: f.to_string() }
            })?;
            let partition = g
                .partition(arg)
                .ok_or_else(|| LogicError::UnknownPartition(arg.clone()))?;
            individuals.push((partition.domain.as_str(), partition.indices[bound.pos]));
        }
        let key = (predicate, individuals);
        if let Some(v) = self.atoms.get(&key) {
            return Ok(*v);
        }
        let pred = g.predicate(predicate).ok_or_else(|| LogicError::UnknownPredicate {
            predicate: predicate.to_string(),
            atom: f.to_string(),
        })?;
        if pred.arity != args.len() {
            return Err(LogicError::Arity { atom: f.to_string(), expected: pred.arity });
        }
        let mut input = Vec::with_capacity(pred.network.input_dim());
        for &(domain, row) in &key.1 {
            input.extend(self.row(domain, row));
        }
        if input.len() != pred.network.input_dim() {
            return Err(LogicError::InputDim {
                atom: f.to_string(),
                expected: pred.network.input_dim(),
                actual: input.len(),
            });
        }
        let (start, end) = self.predicate_params[predicate];
        let params = &self.params[start..end];
        let out = pred.network.forward(self.tape, params, &input);
        self.atoms.insert(key, out);
        Ok(out)
    }

    fn row(&mut self, domain: &'a str, row: usize) -> Vec<T::Value> {
        if let Some(rows) = self.trainable_rows.get(domain) {
            return rows[row].clone();
        }
        if let Some(cached) = self.constant_rows.get(&(domain, row)) {
            return cached.clone();
        }
        let d = self.groundings.domain(domain).expect("partition domain exists");
        let handles: Vec<T::Value> = d.rows()[row].iter().map(|&x| self.tape.constant(x)).collect();
        self.constant_rows.insert((domain, row), handles.clone());
        handles
    }
}

/// Plain truth value of a closed formula under the current parameters.
pub fn formula_sat(
    f: &Formula,
    groundings: &GroundingTable,
    cfg: &ConnectiveConfig,
) -> Result<TruthValue, LogicError> {
    let mut tape = Eval;
    let mut ev = Evaluator::new(&mut tape, groundings, cfg);
    let v = ev.formula_sat(f)?;
    Ok(TruthValue::saturating(v))
}
