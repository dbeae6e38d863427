//! Legendre polynomials on the reference interval `[-1, 1]` and on physical
//! cells, plus Gauss–Legendre quadrature of arbitrary order.

use crate::error::{Error, Result};

/// Highest polynomial degree the solver is tested for.
pub const MAX_DEGREE: usize = 6;

/// Evaluates the Legendre polynomial `p_l(xi)` with the standard normalization
/// `p_l(1) = 1`.
pub fn legendre_eval(l: usize, xi: f64) -> f64 {
    match l {
        0 => 1.0,
        1 => xi,
        _ => {
            let (mut prev, mut cur) = (1.0, xi);
            for n in 1..l {
                let next = ((2 * n + 1) as f64 * xi * cur - n as f64 * prev) / (n + 1) as f64;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Writes `p_0(xi), ..., p_{out.len()-1}(xi)` into `out`.
pub fn legendre_all(xi: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = xi;
    }
    for n in 1..out.len().saturating_sub(1) {
        out[n + 1] = ((2 * n + 1) as f64 * xi * out[n] - n as f64 * out[n - 1]) / (n + 1) as f64;
    }
}

/// `(p_l(xi), p_l'(xi))`, used by the Newton iteration for Gauss nodes.
fn legendre_with_derivative(l: usize, xi: f64) -> (f64, f64) {
    if l == 0 {
        return (1.0, 0.0);
    }
    let (mut prev, mut cur) = (1.0, xi);
    for n in 1..l {
        let next = ((2 * n + 1) as f64 * xi * cur - n as f64 * prev) / (n + 1) as f64;
        prev = cur;
        cur = next;
    }
    // p_l' = l (xi p_l - p_{l-1}) / (xi^2 - 1); nodes are strictly interior
    let deriv = l as f64 * (xi * cur - prev) / (xi * xi - 1.0);
    (cur, deriv)
}

/// Legendre polynomial translated and scaled to the cell
/// `[cell_left, cell_left + cell_width]`.
pub fn scaled_legendre_eval(l: usize, x: f64, cell_left: f64, cell_width: f64) -> f64 {
    legendre_eval(l, 2.0 * (x - cell_left) / cell_width - 1.0)
}

/// Gauss–Legendre rule on `[-1, 1]`.
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

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Iterator over `(node, weight)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Highest polynomial degree integrated exactly.
    pub fn exactness_degree(&self) -> usize {
        2 * self.nodes.len() - 1
    }

    /// Integrates `f` over `[a, b]` with the affine image of this rule.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.iter().map(|(x, w)| w * f(mid + half * x)).sum::<f64>() * half
    }
}

/// Number of Gauss nodes that integrates polynomials of degree `d` exactly.
pub fn nodes_for_degree(d: usize) -> usize {
    d / 2 + 1
}

/// Builds the `n`-point Gauss–Legendre rule.
///
/// Nodes are the roots of `p_n`, found by Newton iteration from Chebyshev
/// initial guesses; nodes are returned in ascending order.
pub fn gauss_rule(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "Gauss rule needs at least one node".into(),
        ));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // root i counted from the right end
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut deriv = 1.0;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            deriv = dp;
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        if dp.is_finite() {
            deriv = dp;
        }
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Monomial coefficients of `p_l`, lowest degree first.
pub fn legendre_monomial_coeffs(l: usize) -> Vec<f64> {
    let mut prev = vec![1.0];
    if l == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 1.0];
    for n in 1..l {
        let mut next = vec![0.0; n + 2];
        for (a, c) in cur.iter().enumerate() {
            next[a + 1] += (2 * n + 1) as f64 * c;
        }
        for (a, c) in prev.iter().enumerate() {
            next[a] -= n as f64 * c;
        }
        for c in next.iter_mut() {
            *c /= (n + 1) as f64;
        }
        prev = cur;
        cur = next;
    }
    cur
}
