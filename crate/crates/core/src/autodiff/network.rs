//! Small dense networks used as predicate groundings.

use rand::Rng;

use super::tape::{Eval, Tape};
use super::AutodiffError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Elu,
    Sigmoid,
    Identity,
}

/// One fully connected layer. `weights` is row-major `out_dim × in_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub in_dim: usize,
    pub out_dim: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl Layer {
    pub fn zeros(in_dim: usize, out_dim: usize, activation: Activation) -> Self {
        Self {
            in_dim,
            out_dim,
            weights: vec![0.0; in_dim * out_dim],
            bias: vec![0.0; out_dim],
            activation,
        }
    }

    fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

/// Feed-forward network mapping `input_dim` reals to a single output.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseNetwork {
    layers: Vec<Layer>,
}

impl DenseNetwork {
    /// Checks that layer shapes chain and that the last layer has one output.
    pub fn from_layers(layers: Vec<Layer>) -> Result<Self, AutodiffError> {
        if layers.is_empty() {
            return Err(AutodiffError::Shape("network has no layers".into()));
        }
        for (i, layer) in layers.iter().enumerate() {
            if layer.in_dim == 0 || layer.out_dim == 0 {
                return Err(AutodiffError::Shape(format!("layer {i} has a zero dimension")));
            }
            if layer.weights.len() != layer.in_dim * layer.out_dim
                || layer.bias.len() != layer.out_dim
            {
                return Err(AutodiffError::Shape(format!(
                    "layer {i} parameters do not match {}x{}",
                    layer.out_dim, layer.in_dim
                )));
            }
        }
        for (i, pair) in layers.windows(2).enumerate() {
            if pair[0].out_dim != pair[1].in_dim {
                return Err(AutodiffError::Shape(format!(
                    "layer {i} outputs {} values but layer {} expects {}",
                    pair[0].out_dim,
                    i + 1,
                    pair[1].in_dim
                )));
            }
        }
        let last = layers.last().expect("non-empty");
        if last.out_dim != 1 {
            return Err(AutodiffError::Shape(format!(
                "final layer must have one output, has {}",
                last.out_dim
            )));
        }
        Ok(Self { layers })
    }

    /// All-zero network with elu hidden layers and a sigmoid head.
    pub fn zeros(input_dim: usize, hidden: &[usize]) -> Result<Self, AutodiffError> {
        let mut dims = Vec::with_capacity(hidden.len() + 2);
        dims.push(input_dim);
        dims.extend_from_slice(hidden);
        dims.push(1);
        let layers = dims
            .windows(2)
            .enumerate()
            .map(|(i, d)| {
                let act = if i + 2 == dims.len() { Activation::Sigmoid } else { Activation::Elu };
                Layer::zeros(d[0], d[1], act)
            })
            .collect();
        Self::from_layers(layers)
    }

    /// Like [`DenseNetwork::zeros`] with weights drawn by [`DenseNetwork::init_glorot`].
    pub fn glorot<R: Rng + ?Sized>(
        input_dim: usize,
        hidden: &[usize],
        rng: &mut R,
    ) -> Result<Self, AutodiffError> {
        let mut net = Self::zeros(input_dim, hidden)?;
        net.init_glorot(rng);
        Ok(net)
    }

    /// Weights ~ U(−√(6/(fan_in+fan_out)), +√(6/(fan_in+fan_out))), biases zero.
    pub fn init_glorot<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for layer in &mut self.layers {
            let limit = (6.0 / (layer.in_dim + layer.out_dim) as f64).sqrt();
            for w in &mut layer.weights {
                *w = rng.random_range(-limit..=limit);
            }
            layer.bias.iter_mut().for_each(|b| *b = 0.0);
        }
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn final_activation(&self) -> Activation {
        self.layers.last().expect("non-empty").activation
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Layer::param_count).sum()
    }

    /// Parameters in canonical order: per layer, weights then bias.
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for layer in &self.layers {
            out.extend_from_slice(&layer.weights);
            out.extend_from_slice(&layer.bias);
        }
        out
    }

    /// Inverse of [`DenseNetwork::params`].
    pub fn set_params(&mut self, values: &[f64]) -> Result<(), AutodiffError> {
        if values.len() != self.param_count() {
            return Err(AutodiffError::LengthMismatch {
                expected: self.param_count(),
                actual: values.len(),
            });
        }
        let mut rest = values;
        for layer in &mut self.layers {
            let (w, tail) = rest.split_at(layer.weights.len());
            let (b, tail) = tail.split_at(layer.bias.len());
            layer.weights.copy_from_slice(w);
            layer.bias.copy_from_slice(b);
            rest = tail;
        }
        Ok(())
    }

    /// Forward pass on any tape. `params` holds handles in the order of
    /// [`DenseNetwork::params`].
    pub fn forward<T: Tape>(&self, tape: &mut T, params: &[T::Value], input: &[T::Value]) -> T::Value {
        debug_assert_eq!(params.len(), self.param_count());
        debug_assert_eq!(input.len(), self.input_dim());
        let mut offset = 0;
        let mut current: Vec<T::Value> = input.to_vec();
        for layer in &self.layers {
            let weights = &params[offset..offset + layer.weights.len()];
            let biases = &params[offset + layer.weights.len()..offset + layer.param_count()];
            offset += layer.param_count();
            let mut next = Vec::with_capacity(layer.out_dim);
            for (o, &bias) in biases.iter().enumerate() {
                let row = &weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                let pre = tape.affine(bias, row, &current);
                next.push(match layer.activation {
                    Activation::Elu => tape.elu(pre),
                    Activation::Sigmoid => tape.sigmoid(pre),
                    Activation::Identity => pre,
                });
            }
            current = next;
        }
        current[0]
    }

    /// Applies the network to every row; one output per row.
    pub fn apply(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>, AutodiffError> {
        let params = self.params();
        rows.iter()
            .map(|row| {
                if row.len() != self.input_dim() {
                    return Err(AutodiffError::DimensionMismatch {
                        expected: self.input_dim(),
                        actual: row.len(),
                    });
                }
                Ok(self.forward(&mut Eval, &params, row))
            })
            .collect()
    }
}
