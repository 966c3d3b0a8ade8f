//! Append-only scalar computation graph with reverse-mode differentiation.
//!
//! Every node stores its operation and a cached value. Nodes only ever refer
//! to nodes created before them, so insertion order is a topological order
//! and the backward sweep is a single reverse pass over the node list.

use std::collections::HashMap;

use super::tape::{elu, sigmoid, Tape};
use super::AutodiffError;

/// Handle to a node of a [`Graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    /// Externally supplied value (parameters, trainable inputs).
    Leaf,
    Const,
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    Mul(NodeId, NodeId),
    OneMinus(NodeId),
    Sigmoid(NodeId),
    Elu(NodeId),
    Powf(NodeId, f64),
    Clamp(NodeId, f64, f64),
    /// `operands[start]` is the bias, followed by `len` weights and `len` inputs.
    Affine { start: u32, len: u32 },
    Mean { start: u32, len: u32 },
}

#[derive(Debug, Clone)]
struct Node {
    op: Op,
    value: f64,
}

/// Scalar computation graph. See the module docs.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    nodes: Vec<Node>,
    operands: Vec<NodeId>,
    /// Set when a leaf changed after the last full evaluation.
    stale: bool,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Removes every node, keeping the allocations for reuse.
    pub fn clear(&mut self) {
        self.nodes.clear();
        self.operands.clear();
        self.stale = false;
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Adds a leaf holding `value`.
    pub fn leaf(&mut self, value: f64) -> NodeId {
        self.push(Op::Leaf, value)
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        matches!(self.nodes.get(id.index()).map(|n| n.op), Some(Op::Leaf))
    }

    /// Ids of every leaf, in creation order.
    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.op == Op::Leaf)
            .map(|(i, _)| NodeId(i as u32))
    }

    /// Cached value of `id`.
    pub fn get(&self, id: NodeId) -> f64 {
        self.nodes[id.index()].value
    }

    /// Overwrites a leaf value. Downstream values are stale until
    /// [`Graph::recompute`] runs.
    pub fn set_leaf(&mut self, id: NodeId, value: f64) -> Result<(), AutodiffError> {
        match self.nodes.get_mut(id.index()) {
            Some(node) if node.op == Op::Leaf => {
                node.value = value;
                self.stale = true;
                Ok(())
            }
            _ => Err(AutodiffError::NotALeaf(id.index())),
        }
    }

    /// Re-evaluates every non-leaf node in insertion order.
    pub fn recompute(&mut self) {
        for i in 0..self.nodes.len() {
            let op = self.nodes[i].op;
            if op != Op::Leaf && op != Op::Const {
                self.nodes[i].value = self.eval_op(op);
            }
        }
        self.stale = false;
    }

    /// Assigns every leaf from `leaf_values` and re-evaluates the graph.
    ///
    /// Fails without touching the graph if any leaf has no value.
    pub fn forward(
        &mut self,
        leaf_values: &HashMap<NodeId, f64>,
    ) -> Result<Vec<f64>, AutodiffError> {
        if let Some(missing) = self.leaves().find(|id| !leaf_values.contains_key(id)) {
            return Err(AutodiffError::MissingLeaf(missing.index()));
        }
        for (&id, &value) in leaf_values {
            self.set_leaf(id, value)?;
        }
        self.recompute();
        Ok(self.nodes.iter().map(|n| n.value).collect())
    }

    /// Reverse sweep from `root`. The returned adjoints cover every node.
    pub fn backward(&self, root: NodeId) -> Result<Gradients, AutodiffError> {
        let r = root.index();
        if r >= self.nodes.len() {
            return Err(AutodiffError::UnknownNode(r));
        }
        if self.stale {
            return Err(AutodiffError::NotEvaluated(r));
        }
        let mut adj = vec![0.0; r + 1];
        adj[r] = 1.0;
        for i in (0..=r).rev() {
            let g = adj[i];
            if g == 0.0 {
                continue;
            }
            let node = &self.nodes[i];
            match node.op {
                Op::Leaf | Op::Const => {}
                Op::Add(a, b) => {
                    adj[a.index()] += g;
                    adj[b.index()] += g;
                }
                Op::Sub(a, b) => {
                    adj[a.index()] += g;
                    adj[b.index()] -= g;
                }
                Op::Mul(a, b) => {
                    adj[a.index()] += g * self.get(b);
                    adj[b.index()] += g * self.get(a);
                }
                Op::OneMinus(a) => adj[a.index()] -= g,
                Op::Sigmoid(a) => {
                    let s = node.value;
                    adj[a.index()] += g * s * (1.0 - s);
                }
                Op::Elu(a) => {
                    let d = if self.get(a) > 0.0 { 1.0 } else { node.value + 1.0 };
                    adj[a.index()] += g * d;
                }
                Op::Powf(a, p) => {
                    adj[a.index()] += g * p * self.get(a).powf(p - 1.0);
                }
                Op::Clamp(a, lo, hi) => {
                    let x = self.get(a);
                    if x >= lo && x <= hi {
                        adj[a.index()] += g;
                    }
                }
                Op::Affine { start, len } => {
                    let (s, n) = (start as usize, len as usize);
                    let bias = self.operands[s];
                    let weights = &self.operands[s + 1..s + 1 + n];
                    let inputs = &self.operands[s + 1 + n..s + 1 + 2 * n];
                    adj[bias.index()] += g;
                    for (w, x) in weights.iter().zip(inputs) {
                        adj[w.index()] += g * self.get(*x);
                        adj[x.index()] += g * self.get(*w);
                    }
                }
                Op::Mean { start, len } => {
                    let share = g / len as f64;
                    for x in &self.operands[start as usize..(start + len) as usize] {
                        adj[x.index()] += share;
                    }
                }
            }
        }
        Ok(Gradients { adjoints: adj })
    }

    fn push(&mut self, op: Op, value: f64) -> NodeId {
        let id = NodeId(u32::try_from(self.nodes.len()).expect("graph exceeds u32 nodes"));
        self.nodes.push(Node { op, value });
        id
    }

    fn push_operands(&mut self, ids: &[NodeId]) -> u32 {
        let start = self.operands.len() as u32;
        self.operands.extend_from_slice(ids);
        start
    }

    fn eval_op(&self, op: Op) -> f64 {
        let v = |id: NodeId| self.nodes[id.index()].value;
        match op {
            Op::Leaf | Op::Const => unreachable!("leaves are not recomputed"),
            Op::Add(a, b) => v(a) + v(b),
            Op::Sub(a, b) => v(a) - v(b),
            Op::Mul(a, b) => v(a) * v(b),
            Op::OneMinus(a) => 1.0 - v(a),
            Op::Sigmoid(a) => sigmoid(v(a)),
            Op::Elu(a) => elu(v(a)),
            Op::Powf(a, p) => v(a).powf(p),
            Op::Clamp(a, lo, hi) => v(a).clamp(lo, hi),
            Op::Affine { start, len } => {
                let (s, n) = (start as usize, len as usize);
                let mut acc = v(self.operands[s]);
                for k in 0..n {
                    acc += v(self.operands[s + 1 + k]) * v(self.operands[s + 1 + n + k]);
                }
                acc
            }
            Op::Mean { start, len } => {
                let xs = &self.operands[start as usize..(start + len) as usize];
                let mut acc = 0.0;
                for x in xs {
                    acc += v(*x);
                }
                acc / len as f64
            }
        }
    }

    fn record(&mut self, op: Op) -> NodeId {
        let value = self.eval_op(op);
        self.push(op, value)
    }
}

impl Tape for Graph {
    type Value = NodeId;

    fn constant(&mut self, v: f64) -> NodeId {
        self.push(Op::Const, v)
    }

    fn parameter(&mut self, v: f64) -> NodeId {
        self.leaf(v)
    }

    fn value(&self, x: NodeId) -> f64 {
        self.get(x)
    }

    fn add(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.record(Op::Add(a, b))
    }

    fn sub(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.record(Op::Sub(a, b))
    }

    fn mul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.record(Op::Mul(a, b))
    }

    fn one_minus(&mut self, a: NodeId) -> NodeId {
        self.record(Op::OneMinus(a))
    }

    fn sigmoid(&mut self, a: NodeId) -> NodeId {
        self.record(Op::Sigmoid(a))
    }

    fn elu(&mut self, a: NodeId) -> NodeId {
        self.record(Op::Elu(a))
    }

    fn powf(&mut self, a: NodeId, p: f64) -> NodeId {
        self.record(Op::Powf(a, p))
    }

    fn clamp(&mut self, a: NodeId, lo: f64, hi: f64) -> NodeId {
        self.record(Op::Clamp(a, lo, hi))
    }

    fn affine(&mut self, bias: NodeId, weights: &[NodeId], inputs: &[NodeId]) -> NodeId {
        assert_eq!(weights.len(), inputs.len(), "affine operand length mismatch");
        let start = self.push_operands(&[bias]);
        self.push_operands(weights);
        self.push_operands(inputs);
        self.record(Op::Affine { start, len: weights.len() as u32 })
    }

    fn mean(&mut self, xs: &[NodeId]) -> NodeId {
        assert!(!xs.is_empty(), "mean of no operands");
        let start = self.push_operands(xs);
        self.record(Op::Mean { start, len: xs.len() as u32 })
    }
}

/// Adjoints produced by [`Graph::backward`].
#[derive(Debug, Clone)]
pub struct Gradients {
    adjoints: Vec<f64>,
}

impl Gradients {
    /// ∂root/∂`id`; zero for nodes the root does not depend on.
    pub fn wrt(&self, id: NodeId) -> f64 {
        self.adjoints.get(id.index()).copied().unwrap_or(0.0)
    }
}
