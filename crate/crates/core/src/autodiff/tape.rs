/// Scalar operation recorder shared by the differentiable [`Graph`] and the
/// plain [`Eval`] interpreter.
///
/// Code written against `Tape` (networks, connectives, formula evaluation)
/// performs the same floating-point operations in the same order on both
/// backends, so plain evaluation reproduces graph values bit-for-bit.
///
/// [`Graph`]: super::Graph
pub trait Tape {
    type Value: Copy;

    fn constant(&mut self, v: f64) -> Self::Value;
    /// A value gradients are taken with respect to.
    fn parameter(&mut self, v: f64) -> Self::Value;
    fn value(&self, x: Self::Value) -> f64;

    fn add(&mut self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn sub(&mut self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn mul(&mut self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn one_minus(&mut self, a: Self::Value) -> Self::Value;
    fn sigmoid(&mut self, a: Self::Value) -> Self::Value;
    fn elu(&mut self, a: Self::Value) -> Self::Value;
    fn powf(&mut self, a: Self::Value, p: f64) -> Self::Value;
    fn clamp(&mut self, a: Self::Value, lo: f64, hi: f64) -> Self::Value;
    /// `bias + Σ weights[i] * inputs[i]`, accumulated left to right.
    fn affine(
        &mut self,
        bias: Self::Value,
        weights: &[Self::Value],
        inputs: &[Self::Value],
    ) -> Self::Value;
    fn mean(&mut self, xs: &[Self::Value]) -> Self::Value;
}

/// Non-recording tape: every value is a plain `f64`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Eval;

impl Tape for Eval {
    type Value = f64;

    fn constant(&mut self, v: f64) -> f64 {
        v
    }

    fn parameter(&mut self, v: f64) -> f64 {
        v
    }

    fn value(&self, x: f64) -> f64 {
        x
    }

    fn add(&mut self, a: f64, b: f64) -> f64 {
        a + b
    }

    fn sub(&mut self, a: f64, b: f64) -> f64 {
        a - b
    }

    fn mul(&mut self, a: f64, b: f64) -> f64 {
        a * b
    }

    fn one_minus(&mut self, a: f64) -> f64 {
        1.0 - a
    }

    fn sigmoid(&mut self, a: f64) -> f64 {
        sigmoid(a)
    }

    fn elu(&mut self, a: f64) -> f64 {
        elu(a)
    }

    fn powf(&mut self, a: f64, p: f64) -> f64 {
        a.powf(p)
    }

    fn clamp(&mut self, a: f64, lo: f64, hi: f64) -> f64 {
        a.clamp(lo, hi)
    }

    fn affine(&mut self, bias: f64, weights: &[f64], inputs: &[f64]) -> f64 {
        assert_eq!(weights.len(), inputs.len(), "affine operand length mismatch");
        let mut acc = bias;
        for (w, x) in weights.iter().zip(inputs) {
            acc += w * x;
        }
        acc
    }

    fn mean(&mut self, xs: &[f64]) -> f64 {
        assert!(!xs.is_empty(), "mean of no operands");
        let mut acc = 0.0;
        for x in xs {
            acc += x;
        }
        acc / xs.len() as f64
    }
}

/// Logistic function, evaluated without overflow for large |x|.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Exponential linear unit with α = 1.
pub fn elu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        x.exp_m1()
    }
}
