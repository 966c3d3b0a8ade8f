//! Scalar reverse-mode automatic differentiation, dense predicate networks
//! and the Adam optimizer.

mod adam;
mod graph;
mod network;
mod tape;

pub use adam::AdamState;
pub use graph::{Gradients, Graph, NodeId};
pub use network::{Activation, DenseNetwork, Layer};
pub use tape::{elu, sigmoid, Eval, Tape};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AutodiffError {
    #[error("no value supplied for leaf node {0}")]
    MissingLeaf(usize),
    #[error("node {0} is not a leaf")]
    NotALeaf(usize),
    #[error("node {0} does not exist")]
    UnknownNode(usize),
    #[error("graph has stale values; recompute before differentiating node {0}")]
    NotEvaluated(usize),
    #[error("input has {actual} columns, network expects {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("non-finite gradient {value} at parameter {index}")]
    NonFiniteGradient { index: usize, value: f64 },
    #[error("invalid network shape: {0}")]
    Shape(String),
}
