//! Gauss-Legendre quadrature.
//!
//! Nodes and weights come from the Golub-Welsch construction: the order-n
//! Legendre rule is the spectral decomposition of the n x n Jacobi matrix
//! with zero diagonal and off-diagonal `k/sqrt(4k^2 - 1)`, nodes being the
//! eigenvalues and weights `2 <1|k>^2`.

use crate::error::{CoreError, Result};
use crate::linalg::eigh_tridiagonal;

/// A Gauss-Legendre rule on the reference interval [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(CoreError::InvalidParameter(
                "quadrature order must be at least 1".into(),
            ));
        }
        let diag = vec![0.0; order];
        let off: Vec<f64> = (1..order)
            .map(|k| {
                let k = k as f64;
                k / (4.0 * k * k - 1.0).sqrt()
            })
            .collect();
        let eig = eigh_tridiagonal(&diag, &off)?;
        let nodes = eig.values().to_vec();
        let weights = (0..order)
            .map(|k| 2.0 * eig.component(k, 0) * eig.component(k, 0))
            .collect();
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

    /// Integrate `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

/// Adaptive bisection with an embedded whole-vs-halves error estimate.
///
/// Refines until `|I_whole - I_left - I_right| <= max(abs_tol_local, rel_tol*|I|)`
/// on every leaf, then sums the refined halves.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    mut f: F,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<f64> {
    const MAX_DEPTH: usize = 48;
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: FnMut(f64) -> f64>(
        rule: &GaussLegendre,
        a: f64,
        b: f64,
        whole: f64,
        f: &mut F,
        rel_tol: f64,
        abs_tol: f64,
        depth: usize,
    ) -> Result<f64> {
        let mid = 0.5 * (a + b);
        let left = rule.integrate(a, mid, &mut *f);
        let right = rule.integrate(mid, b, &mut *f);
        let refined = left + right;
        let err = (whole - refined).abs();
        if err <= abs_tol.max(rel_tol * refined.abs()) {
            return Ok(refined);
        }
        if depth >= MAX_DEPTH {
            return Err(CoreError::QuadratureAccuracy {
                achieved: err,
                target: abs_tol,
            });
        }
        let l = recurse(rule, a, mid, left, f, rel_tol, 0.5 * abs_tol, depth + 1)?;
        let r = recurse(rule, mid, b, right, f, rel_tol, 0.5 * abs_tol, depth + 1)?;
        Ok(l + r)
    }
    let whole = rule.integrate(a, b, &mut f);
    recurse(rule, a, b, whole, &mut f, rel_tol, abs_tol, 0)
}
