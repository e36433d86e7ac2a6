//! Potentials consumed by the samplers.

use alloc::vec::Vec;

/// A differentiable potential `V: R^d -> R`.
pub trait Potential: Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// Writes `grad V(x)` into `grad` and returns `V(x)`.
    fn value_and_grad(&self, x: &[f64], grad: &mut [f64]) -> f64;
}

impl<P: Potential + ?Sized> Potential for &P {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn value_and_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        (**self).value_and_grad(x, grad)
    }
}

/// `V(x) = stiffness * |x|^2 / 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadratic {
    pub dim: usize,
    pub stiffness: f64,
}

impl Potential for Quadratic {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        0.5 * self.stiffness * x.iter().map(|v| v * v).sum::<f64>()
    }

    fn value_and_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        for (g, v) in grad.iter_mut().zip(x) {
            *g = self.stiffness * v;
        }
        self.value(x)
    }
}

/// Independent double wells, `V(x) = coef * sum_i (1 - x_i^2)^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparableDoubleWell {
    pub dim: usize,
    pub coef: f64,
}

impl Potential for SeparableDoubleWell {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.coef
            * x.iter()
                .map(|v| {
                    let w = 1.0 - v * v;
                    w * w
                })
                .sum::<f64>()
    }

    fn value_and_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        for (g, v) in grad.iter_mut().zip(x) {
            *g = -4.0 * self.coef * v * (1.0 - v * v);
        }
        self.value(x)
    }
}

/// Evaluates the gradient into a fresh vector.
pub fn gradient<P: Potential + ?Sized>(potential: &P, x: &[f64]) -> Vec<f64> {
    let mut g = alloc::vec![0.0; x.len()];
    potential.value_and_grad(x, &mut g);
    g
}
