//! Gauss-Hermite quadrature in the probabilists' convention.
//!
//! Rules integrate against the standard normal measure, so weights sum to
//! one and a rule of order `n` is exact on polynomials of degree `2n - 1`.
//! Nodes and weights come from the Golub-Welsch eigendecomposition of the
//! Jacobi matrix (zero diagonal, off-diagonal sqrt(k)), then are symmetrized
//! so that paired nodes are exact negatives and the middle node of an odd
//! rule is exactly zero.

use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A Gauss-Hermite rule: nodes in increasing order with matching weights.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Order used by [`default_rule`]. Exact through polynomial degree 79.
pub const DEFAULT_ORDER: usize = 40;

/// Largest tensor dimension accepted by [`GaussHermite::integrate_tensor`].
pub const MAX_TENSOR_DIM: usize = 4;

impl GaussHermite {
    /// Build a rule with `order` nodes.
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::invalid("order", "quadrature order must be at least 1"));
        }
        if order == 1 {
            return Ok(Self { nodes: vec![0.0], weights: vec![1.0] });
        }

        let mut jacobi = DMatrix::<f64>::zeros(order, order);
        for k in 1..order {
            let b = (k as f64).sqrt();
            jacobi[(k - 1, k)] = b;
            jacobi[(k, k - 1)] = b;
        }
        let eigen = jacobi.symmetric_eigen();

        let mut pairs: Vec<(f64, f64)> = (0..order)
            .map(|i| {
                let first = eigen.eigenvectors[(0, i)];
                (eigen.eigenvalues[i], first * first)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut nodes: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let mut weights: Vec<f64> = pairs.iter().map(|p| p.1).collect();

        // Symmetrize: the measure is even, so force exact +/- node pairs,
        // average paired weights, and pin the middle node of an odd rule
        // to zero.
        for i in 0..order / 2 {
            let j = order - 1 - i;
            let x = 0.5 * (nodes[j] - nodes[i]);
            nodes[i] = -x;
            nodes[j] = x;
            let w = 0.5 * (weights[i] + weights[j]);
            weights[i] = w;
            weights[j] = w;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }

        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }

        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrate `f` against the standard normal measure.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(self.weights.iter())
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Integrate `f` against the `dim`-fold product of standard normal
    /// measures by tensoring the rule. Cost grows as `order^dim`, so the
    /// dimension is capped at [`MAX_TENSOR_DIM`].
    pub fn integrate_tensor<F: Fn(&[f64]) -> f64>(&self, dim: usize, f: F) -> Result<f64> {
        if dim > MAX_TENSOR_DIM {
            return Err(Error::DimensionLimit { limit: MAX_TENSOR_DIM, got: dim });
        }
        if dim == 0 {
            return Ok(f(&[]));
        }
        let n = self.order();
        let mut idx = vec![0usize; dim];
        let mut point = vec![0.0f64; dim];
        let mut total = 0.0;
        loop {
            let mut w = 1.0;
            for (d, &i) in idx.iter().enumerate() {
                point[d] = self.nodes[i];
                w *= self.weights[i];
            }
            total += w * f(&point);

            // Odometer increment over the multi-index.
            let mut d = 0;
            loop {
                idx[d] += 1;
                if idx[d] < n {
                    break;
                }
                idx[d] = 0;
                d += 1;
                if d == dim {
                    return Ok(total);
                }
            }
        }
    }
}

/// Shared rule of order [`DEFAULT_ORDER`], built on first use.
pub fn default_rule() -> &'static GaussHermite {
    static RULE: OnceLock<GaussHermite> = OnceLock::new();
    RULE.get_or_init(|| GaussHermite::new(DEFAULT_ORDER).expect("default order is valid"))
}
