//! Fixed-node Gauss–Legendre quadrature.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_NODE_COUNT: usize = 32;

/// Node count of the fixed Gauss–Legendre rule applied to every integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub node_count: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            node_count: DEFAULT_NODE_COUNT,
        }
    }
}

/// Nodes and weights of an `n`-point Gauss–Legendre rule on `[-1, 1]`.
///
/// Exact for polynomials of degree up to `2n - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Legendre polynomial `P_n(x)` and its derivative by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let dp = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

impl GaussLegendre {
    pub fn new(node_count: usize) -> Result<Self> {
        if node_count < 2 {
            return Err(Error::Domain(format!(
                "quadrature needs at least 2 nodes, got {node_count}"
            )));
        }
        let n = node_count;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let half = n.div_ceil(2);
        for i in 0..half {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let step = p / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn from_spec(spec: QuadratureSpec) -> Result<Self> {
        Self::new(spec.node_count)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫ f` over `[lower, upper]`. A zero-length interval integrates to 0.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, lower: f64, upper: f64) -> f64 {
        if upper == lower {
            return 0.0;
        }
        let half = 0.5 * (upper - lower);
        let mid = 0.5 * (upper + lower);
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(mid + half * t))
            .sum();
        half * sum
    }

    /// Like [`integrate`](Self::integrate) but fails on a non-finite node value.
    pub fn try_integrate<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        lower: f64,
        upper: f64,
    ) -> Result<f64> {
        if !(lower <= upper) {
            return Err(Error::Domain(format!(
                "integration bounds out of order: [{lower}, {upper}]"
            )));
        }
        let mut bad = None;
        let value = self.integrate(
            |x| {
                let y = f(x);
                if !y.is_finite() && bad.is_none() {
                    bad = Some((x, y));
                }
                y
            },
            lower,
            upper,
        );
        match bad {
            Some((x, y)) => Err(Error::Numeric(format!("integrand is {y} at x = {x}"))),
            None => Ok(value),
        }
    }

    /// Applies the rule on each sub-interval delimited by the interior
    /// `breaks`. Used to keep kinks of the integrand (sign changes of `v|v|`)
    /// on panel boundaries, where the rule stays exact.
    pub fn integrate_split<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        lower: f64,
        upper: f64,
        breaks: &[f64],
    ) -> f64 {
        let mut cuts: Vec<f64> = breaks
            .iter()
            .copied()
            .filter(|b| *b > lower && *b < upper)
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut total = 0.0;
        let mut a = lower;
        for b in cuts.into_iter().chain(std::iter::once(upper)) {
            total += self.integrate(&mut f, a, b);
            a = b;
        }
        total
    }
}

impl Default for GaussLegendre {
    fn default() -> Self {
        Self::new(DEFAULT_NODE_COUNT).expect("default node count is valid")
    }
}

/// `∫ f` over `[lower, upper]` with the rule described by `spec`.
pub fn integrate<F: FnMut(f64) -> f64>(
    f: F,
    lower: f64,
    upper: f64,
    spec: QuadratureSpec,
) -> Result<f64> {
    GaussLegendre::from_spec(spec)?.try_integrate(f, lower, upper)
}
