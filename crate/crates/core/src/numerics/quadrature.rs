use crate::{Error, Result};

/// Gauss-Legendre rule on the reference interval `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// `(node, weight)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// `order`-point Gauss-Legendre rule, exact for polynomials of degree
/// `2 order - 1`.
///
/// Roots of `P_n` are found by Newton iteration from the Chebyshev-like
/// initial guess `cos(π (i - 1/4) / (n + 1/2))`.
pub fn gauss_legendre_rule(order: usize) -> Result<QuadratureRule> {
    if !(1..=16).contains(&order) {
        return Err(Error::InvalidQuadratureOrder(order));
    }
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, t);
            let step = p / d;
            t -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, t);
        let w = 2.0 / ((1.0 - t * t) * dp * dp);
        // map [-1, 1] -> [0, 1]; t is descending in i
        nodes[i] = 0.5 * (1.0 - t);
        nodes[n - 1 - i] = 0.5 * (1.0 + t);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.5;
    }
    Ok(QuadratureRule { nodes, weights })
}

/// `P_n(t)` and `P_n'(t)` by the three-term recurrence.
fn legendre(n: usize, t: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, t);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}

/// `∫_0^width g(ξ) dξ ≈ width Σ w_k g(width t_k)`.
pub fn integrate_on_element<F>(rule: &QuadratureRule, width: f64, mut integrand: F) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut sum = 0.0;
    for (t, w) in rule.iter() {
        let xi = width * t;
        let value = integrand(xi);
        if !value.is_finite() {
            return Err(Error::NonFiniteIntegrand { node: xi, value });
        }
        sum += w * value;
    }
    Ok(width * sum)
}
