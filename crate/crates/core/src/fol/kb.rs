use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::ast::Formula;
use super::grounding::GroundingTable;
use super::ValidationError;

/// A named formula of the knowledge base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub id: String,
    pub formula: Formula,
    pub label: String,
    /// Source line, 0 when not read from a file.
    pub line: usize,
}

impl Rule {
    pub fn new(id: &str, formula: Formula, label: &str) -> Self {
        Self { id: id.to_string(), formula, label: label.to_string(), line: 0 }
    }

    fn context(&self) -> String {
        if self.line > 0 {
            format!("rule `{}` (line {})", self.id, self.line)
        } else {
            format!("rule `{}`", self.id)
        }
    }
}

/// Ordered rules plus the groundings they are evaluated against.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct KnowledgeBase {
    rules: Vec<Rule>,
    pub groundings: GroundingTable,
}

impl KnowledgeBase {
    /// Rule ids are assumed unique; [`validate_kb`] reports duplicates.
    pub fn from_rules(rules: Vec<Rule>) -> Self {
        Self { rules, groundings: GroundingTable::new() }
    }

    pub fn with_groundings(mut self, groundings: GroundingTable) -> Self {
        self.groundings = groundings;
        self
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }

    pub fn rule_ids(&self) -> Vec<String> {
        self.rules.iter().map(|r| r.id.clone()).collect()
    }

    /// Canonical KB file text: `id : formula  # label` per rule.
    pub fn to_kb_text(&self) -> String {
        let mut out = String::new();
        for r in &self.rules {
            if r.label == r.id {
                let _ = writeln!(out, "{} : {}", r.id, r.formula);
            } else {
                let _ = writeln!(out, "{} : {}  # {}", r.id, r.formula, r.label);
            }
        }
        out
    }
}

/// Checks every rule against the grounding table and the grounding table
/// itself. All violations are reported, not just the first.
pub fn validate_kb(kb: &KnowledgeBase) -> Result<(), Vec<ValidationError>> {
    let mut errors = kb.groundings.validate();
    errors.extend(check_rules(kb, Some(&kb.groundings)));
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

/// Grounding-independent checks: duplicate ids, unbound variables and
/// predicates used with different arities.
pub fn validate_rules(kb: &KnowledgeBase) -> Result<(), Vec<ValidationError>> {
    let errors = check_rules(kb, None);
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

fn check_rules(kb: &KnowledgeBase, g: Option<&GroundingTable>) -> Vec<ValidationError> {
    let mut errors = Vec::new();
    for dup in super::parser::duplicates(kb.rules.iter().map(|r| r.id.as_str())) {
        errors.push(ValidationError::DuplicateRule(dup.to_string()));
    }
    let mut arities: BTreeMap<&str, (usize, String)> = BTreeMap::new();
    for rule in &kb.rules {
        let context = rule.context();
        for (pred, args) in rule.formula.atoms() {
            match arities.get(pred) {
                None => {
                    arities.insert(pred, (args.len(), context.clone()));
                }
                Some((n, first)) if *n != args.len() => {
                    errors.push(ValidationError::ArityClash {
                        predicate: pred.to_string(),
                        first: *n,
                        first_context: first.clone(),
                        found: args.len(),
                        context: context.clone(),
                    });
                }
                _ => {}
            }
        }
        walk(&rule.formula, g, &context, &mut Vec::new(), &mut errors);
    }
    errors
}

/// Scoping, partition, and predicate checks for one formula.
pub fn validate_formula(f: &Formula, g: &GroundingTable, context: &str) -> Vec<ValidationError> {
    let mut errors = Vec::new();
    let mut scope = Vec::new();
    walk(f, Some(g), context, &mut scope, &mut errors);
    errors
}

fn walk<'a>(
    f: &'a Formula,
    g: Option<&GroundingTable>,
    context: &str,
    scope: &mut Vec<&'a str>,
    errors: &mut Vec<ValidationError>,
) {
    match f {
        Formula::Atom { predicate, args } => {
            let mut unbound = false;
            for a in args {
                if !scope.contains(&a.as_str()) {
                    unbound = true;
                    errors.push(ValidationError::UnboundVariable {
                        var: a.clone(),
                        atom: f.to_string(),
                        context: context.to_string(),
                    });
                }
            }
            let Some(g) = g else { return };
            let Some(pred) = g.predicate(predicate) else {
                errors.push(ValidationError::UnknownPredicate {
                    predicate: predicate.clone(),
                    context: context.to_string(),
                });
                return;
            };
            if pred.arity != args.len() {
                errors.push(ValidationError::ArityMismatch {
                    predicate: predicate.clone(),
                    expected: pred.arity,
                    found: args.len(),
                    context: context.to_string(),
                });
                return;
            }
            if unbound {
                return;
            }
            let dims: Option<usize> = args
                .iter()
                .map(|a| g.partition(a).and_then(|p| g.domain(&p.domain)).map(|d| d.dim()))
                .sum();
            if let Some(dim) = dims {
                if dim != pred.network.input_dim() {
                    errors.push(ValidationError::InputDimMismatch {
                        predicate: predicate.clone(),
                        expected: pred.network.input_dim(),
                        found: dim,
                        context: context.to_string(),
                    });
                }
            }
        }
        Formula::Not(a) => walk(a, g, context, scope, errors),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            walk(a, g, context, scope, errors);
            walk(b, g, context, scope, errors);
        }
        Formula::ForAll { var, body } | Formula::Exists { var, body } => {
            if g.is_some_and(|g| g.partition(var).is_none()) {
                errors.push(ValidationError::UnknownPartition {
                    context: context.to_string(),
                    partition: var.clone(),
                });
            }
            scope.push(var);
            walk(body, g, context, scope, errors);
            scope.pop();
        }
    }
}
