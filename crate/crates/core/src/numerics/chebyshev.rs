//! Chebyshev-Gauss-Lobatto collocation on `[0, T]`.

use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Nodes, differentiation matrix and Clenshaw-Curtis weights on `[0, T]`.
///
/// Node 0 sits at `t = 0` and node `n` at `t = T`.
#[derive(Debug, Clone)]
pub struct ChebGrid {
    pub t_max: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub diff: DMatrix<f64>,
}

impl ChebGrid {
    /// Grid with `n + 1` nodes.
    pub fn new(n: usize, t_max: f64) -> Self {
        assert!(n >= 2);
        let x: Vec<f64> = (0..=n).map(|j| (PI * j as f64 / n as f64).cos()).collect();
        let nodes: Vec<f64> = x.iter().map(|xi| 0.5 * t_max * (1.0 - xi)).collect();

        let c = |i: usize| -> f64 {
            let base = if i == 0 || i == n { 2.0 } else { 1.0 };
            if i % 2 == 0 {
                base
            } else {
                -base
            }
        };
        let mut d = DMatrix::<f64>::zeros(n + 1, n + 1);
        for i in 0..=n {
            let mut row = 0.0;
            for j in 0..=n {
                if i != j {
                    let v = c(i) / c(j) / (x[i] - x[j]);
                    d[(i, j)] = v;
                    row += v;
                }
            }
            d[(i, i)] = -row;
        }
        // d/dt = -(2/T) d/dx
        d *= -2.0 / t_max;

        let mut w = vec![0.0; n + 1];
        let theta: Vec<f64> = (0..=n).map(|j| PI * j as f64 / n as f64).collect();
        let mut v = vec![1.0; n + 1];
        let nf = n as f64;
        if n % 2 == 0 {
            w[0] = 1.0 / (nf * nf - 1.0);
            w[n] = w[0];
            for k in 1..n / 2 {
                let kf = k as f64;
                for i in 1..n {
                    v[i] -= 2.0 * (2.0 * kf * theta[i]).cos() / (4.0 * kf * kf - 1.0);
                }
            }
            for i in 1..n {
                v[i] -= (nf * theta[i]).cos() / (nf * nf - 1.0);
            }
        } else {
            w[0] = 1.0 / (nf * nf);
            w[n] = w[0];
            for k in 1..=(n - 1) / 2 {
                let kf = k as f64;
                for i in 1..n {
                    v[i] -= 2.0 * (2.0 * kf * theta[i]).cos() / (4.0 * kf * kf - 1.0);
                }
            }
        }
        for i in 1..n {
            w[i] = 2.0 * v[i] / nf;
        }
        for wi in &mut w {
            *wi *= 0.5 * t_max;
        }
        ChebGrid { t_max, nodes, weights: w, diff: d }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Barycentric interpolation of nodal `values` at `t`.
    pub fn interpolate(&self, values: &[f64], t: f64) -> f64 {
        interpolate_cgl(&self.nodes, values, t)
    }
}

/// Barycentric interpolation through Chebyshev-Gauss-Lobatto nodes.
pub fn interpolate_cgl(nodes: &[f64], values: &[f64], t: f64) -> f64 {
    let n = nodes.len() - 1;
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..=n {
        let diff = t - nodes[j];
        if diff == 0.0 {
            return values[j];
        }
        let mut wj = if j % 2 == 0 { 1.0 } else { -1.0 };
        if j == 0 || j == n {
            wj *= 0.5;
        }
        let q = wj / diff;
        num += q * values[j];
        den += q;
    }
    num / den
}
