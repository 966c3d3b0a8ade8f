//! Rule language: formulas, the text parser, groundings and validation.

mod ast;
mod grounding;
mod kb;
mod parser;

pub use ast::Formula;
pub use grounding::{Domain, GroundingTable, Partition, Predicate};
pub use kb::{validate_formula, validate_kb, validate_rules, KnowledgeBase, Rule};
pub use parser::{parse_formula, parse_kb, KbParseError, ParseError};

pub(crate) use parser::is_identifier;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("{context}: variable `{var}` in `{atom}` is not bound by a quantifier")]
    UnboundVariable { var: String, atom: String, context: String },
    #[error("{context}: no partition named `{partition}`")]
    UnknownPartition { context: String, partition: String },
    #[error("{context}: unknown predicate `{predicate}`")]
    UnknownPredicate { predicate: String, context: String },
    #[error("{context}: predicate `{predicate}` used with arity {found}, but with arity {first} in {first_context}")]
    ArityClash {
        predicate: String,
        first: usize,
        first_context: String,
        found: usize,
        context: String,
    },
    #[error("{context}: predicate `{predicate}` takes {expected} arguments, got {found}")]
    ArityMismatch { predicate: String, expected: usize, found: usize, context: String },
    #[error("{context}: predicate `{predicate}` expects {expected} input features, arguments provide {found}")]
    InputDimMismatch { predicate: String, expected: usize, found: usize, context: String },
    #[error("duplicate rule id `{0}`")]
    DuplicateRule(String),
    #[error("domain `{0}` is empty")]
    EmptyDomain(String),
    #[error("domain `{domain}` row {row} has a different width")]
    RaggedDomain { domain: String, row: usize },
    #[error("partition `{0}` is empty")]
    EmptyPartition(String),
    #[error("partition `{partition}` references unknown domain `{domain}`")]
    UnknownDomain { partition: String, domain: String },
    #[error("partition `{partition}` references row {row} of a {len}-row domain")]
    RowOutOfRange { partition: String, row: usize, len: usize },
    #[error("{context}: mixes domains `{expected}` and `{actual}`")]
    DomainMismatch { context: String, expected: String, actual: String },
    #[error("linked partitions {partitions:?} differ in length")]
    LinkLengthMismatch { partitions: Vec<String> },
}
