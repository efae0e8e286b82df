//! Gauss–Hermite quadrature for the standard Gaussian probability measure,
//! plus seeded Monte Carlo estimation.
//!
//! All rules use the probabilists' convention: weight exp(-x^2/2)/sqrt(2 pi),
//! weights summing to one. A rule of order q integrates polynomials exactly
//! up to degree 2q - 1.

use crate::error::{Error, Result};

use crate::rng::{pairwise_sum, stream_rng, RunningStats};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Nodes and probability weights for expectation against N(0,1).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
}

/// Seeded Monte Carlo estimate.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// Probabilists' Gauss–Hermite rule of the given order.
///
/// Golub–Welsch: nodes are eigenvalues of the Jacobi matrix (zero diagonal,
/// off-diagonal sqrt(k)), weights come from the first eigenvector components.
/// Nodes and weights are symmetrized afterwards to remove asymmetric rounding.
pub fn gauss_hermite_rule(order: usize) -> Result<QuadratureRule> {
    if order < 1 || order > 1000 {
        return Err(Error::parameter(format!(
            "quadrature order must lie in [1, 1000], got {order}"
        )));
    }
    let n = order;
    let mut diag = vec![0.0f64; n];
    let mut off: Vec<f64> = (1..n).map(|k| (k as f64).sqrt()).collect();
    off.push(0.0);
    // first-row accumulation of the eigenvector matrix
    let mut z = vec![0.0f64; n];
    z[0] = 1.0;

    // implicit QL with Wilkinson shifts (tql2 with a single tracked row)
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::solver(format!(
                    "Jacobi matrix eigensolve failed to converge at row {l}"
                )));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            for i in (l..m).rev() {
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                let zi1 = z[i + 1];
                z[i + 1] = s * z[i] + c * zi1;
                z[i] = c * z[i] - s * zi1;
            }
            if r == 0.0 && m > l + 1 {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }

    let mut order_idx: Vec<usize> = (0..n).collect();
    order_idx.sort_by(|&a, &b| diag[a].partial_cmp(&diag[b]).unwrap());
    let mut nodes: Vec<f64> = order_idx.iter().map(|&i| diag[i]).collect();
    let mut weights: Vec<f64> = order_idx.iter().map(|&i| z[i] * z[i]).collect();

    // enforce exact symmetry about zero
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -x;
        nodes[j] = x;
        let w = 0.5 * (weights[i] + weights[j]);
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let total: f64 = pairwise_sum(&weights);
    for w in &mut weights {
        *w /= total;
    }

    Ok(QuadratureRule {
        nodes,
        weights,
        order,
    })
}

/// Expectation of f under the rule's discrete measure.
pub fn expect(rule: &QuadratureRule, f: impl Fn(f64) -> f64) -> Result<f64> {
    let mut terms = Vec::with_capacity(rule.order);
    for (i, (&x, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::evaluation(format!(
                "integrand returned {v} at node {i} (x = {x})"
            )));
        }
        terms.push(w * v);
    }
    Ok(pairwise_sum(&terms))
}

/// Expectation against N_m via the full tensor-product grid.
pub fn tensor_expect(
    rule: &QuadratureRule,
    m: usize,
    f: impl Fn(&[f64]) -> f64,
) -> Result<f64> {
    if m == 0 || m > 4 {
        return Err(Error::parameter(format!(
            "tensor_expect supports dimensions 1..=4, got {m}"
        )));
    }
    let total = (rule.order as f64).powi(m as i32);
    if total > 1e7 {
        return Err(Error::resource(format!(
            "tensor grid of {total:.0} points exceeds 1e7; use mc_expect instead"
        )));
    }
    let q = rule.order;
    let count = q.pow(m as u32);
    let mut terms = Vec::with_capacity(count);
    let mut idx = vec![0usize; m];
    let mut x = vec![0.0f64; m];
    for flat in 0..count {
        let mut rem = flat;
        for k in 0..m {
            idx[k] = rem % q;
            rem /= q;
            x[k] = rule.nodes[idx[k]];
        }
        let v = f(&x);
        if !v.is_finite() {
            return Err(Error::evaluation(format!(
                "integrand returned {v} at grid point {x:?}"
            )));
        }
        let mut w = 1.0;
        for k in 0..m {
            w *= rule.weights[idx[k]];
        }
        terms.push(w * v);
    }
    Ok(pairwise_sum(&terms))
}

/// Monte Carlo expectation with a seeded sampler; identical output for
/// identical (seed, n_samples).
pub fn mc_expect(
    sampler: impl Fn(&mut ChaCha8Rng) -> Vec<f64>,
    f: impl Fn(&[f64]) -> f64,
    n_samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if n_samples < 100 {
        return Err(Error::parameter(format!(
            "mc_expect needs at least 100 samples, got {n_samples}"
        )));
    }
    let mut rng = stream_rng(seed, 0);
    let mut stats = RunningStats::new();
    for i in 0..n_samples {
        let x = sampler(&mut rng);
        let v = f(&x);
        if !v.is_finite() {
            return Err(Error::evaluation(format!(
                "integrand returned {v} at sample {i}"
            )));
        }
        stats.push(v);
    }
    Ok(McEstimate {
        mean: stats.mean(),
        std_error: stats.std_error(),
        n_samples,
        seed,
    })
}

/// Standard normal sampler in the given dimension, for use with `mc_expect`.
pub fn normal_sampler(m: usize) -> impl Fn(&mut ChaCha8Rng) -> Vec<f64> {
    use rand_distr::{Distribution, StandardNormal};
    move |rng| (0..m).map(|_| StandardNormal.sample(rng)).collect()
}
