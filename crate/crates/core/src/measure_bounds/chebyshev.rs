//! Functions on `[0, 1]` held by their values at Chebyshev extreme points.

use std::f64::consts::PI;

use crate::theory::gauss_legendre_01;

#[derive(Clone, Debug)]
pub(crate) struct Chebyshev {
    nodes: Vec<f64>,
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl Chebyshev {
    /// Samples `f` at `degree + 1` points `(1 - cos(jπ/degree))/2`.
    pub(crate) fn sample(degree: usize, f: impl Fn(f64) -> f64) -> Self {
        let nodes: Vec<f64> = (0..=degree)
            .map(|j| 0.5 * (1.0 - (PI * j as f64 / degree as f64).cos()))
            .collect();
        let weights = (0..=degree)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                if j == 0 || j == degree {
                    0.5 * sign
                } else {
                    sign
                }
            })
            .collect();
        let values = nodes.iter().map(|&x| f(x)).collect();
        Chebyshev {
            nodes,
            values,
            weights,
        }
    }

    /// Barycentric interpolation.
    pub(crate) fn eval(&self, x: f64) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for ((&node, &value), &w) in self.nodes.iter().zip(&self.values).zip(&self.weights) {
            let d = x - node;
            if d == 0.0 {
                return value;
            }
            let t = w / d;
            num += t * value;
            den += t;
        }
        num / den
    }

    pub(crate) fn integrate(&self, a: f64, b: f64) -> f64 {
        (b - a) * gauss_legendre_01(|t| self.eval(a + (b - a) * t))
    }
}
