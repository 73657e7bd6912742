//! Gauss–Legendre rules and a composite integrator on [0, 1] with dyadic
//! grading toward the right endpoint.

use crate::error::{Error, Result};

/// Nodes and weights on [−1, 1].
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Narrower panels next to t = 1 would place nodes on the endpoint.
const MIN_PANEL_WIDTH: f64 = 1e-12;

/// Composite rule on [0, 1]: `panels` uniform panels, the last one replaced
/// by `levels` dyadically shrinking panels toward t = 1.
#[derive(Clone, Debug)]
pub struct GradedRule {
    pub panels: usize,
    pub rule: GaussLegendre,
    pub tolerance: f64,
    pub max_levels: usize,
}

impl GradedRule {
    pub fn new(panels: usize) -> Self {
        GradedRule {
            panels: panels.max(1),
            rule: GaussLegendre::new(16),
            tolerance: 1e-8,
            max_levels: 256,
        }
    }

    pub fn integrate_with_levels<F: Fn(f64) -> f64>(&self, f: &F, levels: usize) -> f64 {
        let h = 1.0 / self.panels as f64;
        let mut total = 0.0;
        for p in 0..self.panels - 1 {
            total += self.rule.integrate(p as f64 * h, (p + 1) as f64 * h, f);
        }
        let mut left = 1.0 - h;
        let mut width = h;
        for _ in 0..levels {
            if width < MIN_PANEL_WIDTH {
                break;
            }
            width *= 0.5;
            let right = 1.0 - width;
            if right > left {
                total += self.rule.integrate(left, right, f);
            }
            left = right;
        }
        if left < 1.0 {
            total += self.rule.integrate(left, 1.0, f);
        }
        total
    }

    /// Doubles the grading depth until two successive values agree.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        let mut levels = 4;
        let mut prev = self.integrate_with_levels(&f, levels);
        let mut diff = f64::INFINITY;
        while levels < self.max_levels {
            levels *= 2;
            let next = self.integrate_with_levels(&f, levels);
            diff = (next - prev).abs();
            if diff < self.tolerance {
                return Ok(next);
            }
            prev = next;
        }
        Err(Error::QuadratureNonConvergence(diff))
    }
}
