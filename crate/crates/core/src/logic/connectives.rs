//! Connectives and aggregators written against [`Tape`], so the same code
//! builds differentiable graphs and evaluates plain values.
//!
//! Negation is `1 − a`, conjunction the product t-norm, disjunction the
//! probabilistic sum and implication Reichenbach's `1 − a + a·b`. Universal
//! quantification uses the p-mean error `1 − (mean (1 − aᵢ)^p)^(1/p)` and
//! existential quantification the p-mean `(mean aᵢ^p)^(1/p)`. Operands of the
//! power are clamped to `[eps, 1]` so the root is never taken at zero.

use crate::autodiff::Tape;

pub fn not<T: Tape>(t: &mut T, a: T::Value) -> T::Value {
    t.one_minus(a)
}

pub fn and<T: Tape>(t: &mut T, a: T::Value, b: T::Value) -> T::Value {
    t.mul(a, b)
}

pub fn or<T: Tape>(t: &mut T, a: T::Value, b: T::Value) -> T::Value {
    let sum = t.add(a, b);
    let prod = t.mul(a, b);
    t.sub(sum, prod)
}

pub fn implies<T: Tape>(t: &mut T, a: T::Value, b: T::Value) -> T::Value {
    let na = t.one_minus(a);
    let ab = t.mul(a, b);
    t.add(na, ab)
}

/// p-mean error over `xs`; `xs` must be non-empty.
pub fn forall<T: Tape>(t: &mut T, xs: &[T::Value], p: f64, eps: f64) -> T::Value {
    let powered: Vec<T::Value> = xs
        .iter()
        .map(|&x| {
            let err = t.one_minus(x);
            let err = t.clamp(err, eps, 1.0);
            t.powf(err, p)
        })
        .collect();
    let mean = t.mean(&powered);
    let root = t.powf(mean, 1.0 / p);
    t.one_minus(root)
}

/// p-mean over `xs`; `xs` must be non-empty.
pub fn exists<T: Tape>(t: &mut T, xs: &[T::Value], p: f64, eps: f64) -> T::Value {
    let powered: Vec<T::Value> = xs
        .iter()
        .map(|&x| {
            let x = t.clamp(x, eps, 1.0);
            t.powf(x, p)
        })
        .collect();
    let mean = t.mean(&powered);
    t.powf(mean, 1.0 / p)
}
