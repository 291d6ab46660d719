//! Gauss-Hermite rules rescaled to expectations over a standard normal.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::hermite::GaussHermite;

use crate::error::{parameter, Result};

/// Nodes `z_i` and weights `w_i` with `E[f(Z)] ≈ Σ w_i f(z_i)` for `Z ~ N(0, 1)`.
#[derive(Clone, Debug)]
pub struct NormalRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl NormalRule {
    /// Builds a rule with `order` nodes.
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 {
            return parameter(format!("quadrature order must be at least 2, got {order}"));
        }
        let rule = GaussHermite::new(order.try_into().expect("order >= 2"));
        let scale = std::f64::consts::PI.sqrt().recip();
        let (nodes, weights) = rule
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (std::f64::consts::SQRT_2 * x, w * scale))
            .unzip();
        Ok(Self { nodes, weights })
    }

    /// The rule for `order`, built once per process and shared.
    pub fn shared(order: usize) -> Result<Arc<Self>> {
        static RULES: OnceLock<Mutex<HashMap<usize, Arc<NormalRule>>>> = OnceLock::new();
        let rules = RULES.get_or_init(Default::default);
        if let Some(rule) = rules.lock().expect("rule cache").get(&order) {
            return Ok(Arc::clone(rule));
        }
        let rule = Arc::new(Self::new(order)?);
        let mut cache = rules.lock().expect("rule cache");
        Ok(Arc::clone(cache.entry(order).or_insert(rule)))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Expectation of `f(Z)`.
    pub fn expect(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.iter().map(|(z, w)| w * f(z)).sum()
    }

    /// Expectation of `f(Z1, Z2)` for independent standard normals, by tensor product.
    pub fn expect_2d(&self, mut f: impl FnMut(f64, f64) -> f64) -> f64 {
        let mut total = 0.0;
        for (z1, w1) in self.iter() {
            let mut inner = 0.0;
            for (z2, w2) in self.iter() {
                inner += w2 * f(z1, z2);
            }
            total += w1 * inner;
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn normal_moments() {
        let rule = NormalRule::new(64).unwrap();
        assert_abs_diff_eq!(rule.expect(|_| 1.0), 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(rule.expect(|z| z * z), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rule.expect(|z| z.powi(4)), 3.0, epsilon = 1e-11);
        assert_abs_diff_eq!(rule.expect_2d(|a, b| a * a * b * b), 1.0, epsilon = 1e-11);
    }

    #[test]
    fn shared_rules_are_reused() {
        let a = NormalRule::shared(20).unwrap();
        let b = NormalRule::shared(20).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(a.nodes, NormalRule::new(20).unwrap().nodes);
    }

    #[test]
    fn rejects_tiny_order() {
        assert!(NormalRule::new(1).is_err());
    }
}
