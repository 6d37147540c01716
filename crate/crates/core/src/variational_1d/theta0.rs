use nalgebra::{DMatrix, SymmetricEigen};
use std::sync::OnceLock;

use crate::numerics::chebyshev::ChebGrid;
use crate::numerics::optimize::{golden_section, scan_bracket, secant};
use crate::{Error, Result};

/// Chebyshev grid on `[0, t_max]` with `nodes + 1` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfLineGrid {
    pub t_max: f64,
    pub nodes: usize,
}

impl Default for HalfLineGrid {
    fn default() -> Self {
        HalfLineGrid { t_max: 12.0, nodes: 96 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Theta0 {
    pub theta0: f64,
    pub alpha0: f64,
    /// Change of `Θ₀` when the node count is multiplied by 3/2.
    pub refinement_change: f64,
}

/// Lowest eigenvalue of `−∂²_t + (t+α)²` on the Chebyshev grid.
pub fn lowest_eigenvalue(alpha: f64, grid: &ChebGrid) -> f64 {
    lowest_pair(alpha, grid).0
}

/// Lowest eigenvalue and `∂λ/∂α = ∫ 2(t+α) v²` for the normalized eigenfunction.
fn lowest_pair(alpha: f64, grid: &ChebGrid) -> (f64, f64) {
    let m = grid.len() - 1;
    let d = grid.diff.view((0, 0), (grid.len(), m));
    let w = &grid.weights;
    let mut k = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let mut s = 0.0;
            for q in 0..grid.len() {
                s += d[(q, i)] * w[q] * d[(q, j)];
            }
            k[(i, j)] = s;
            k[(j, i)] = s;
        }
        k[(i, i)] += w[i] * (grid.nodes[i] + alpha).powi(2);
    }
    let inv_sqrt: Vec<f64> = w[..m].iter().map(|x| 1.0 / x.sqrt()).collect();
    for i in 0..m {
        for j in 0..m {
            k[(i, j)] *= inv_sqrt[i] * inv_sqrt[j];
        }
    }
    let eig = SymmetricEigen::new(k);
    let idx = eig.eigenvalues.imin();
    let v = eig.eigenvectors.column(idx);
    // v = W^{1/2}·(nodal values), so Σ (t+α) v² is the weighted integral.
    let slope = (0..m).map(|i| 2.0 * (grid.nodes[i] + alpha) * v[i] * v[i]).sum();
    (eig.eigenvalues[idx], slope)
}

fn minimize_over_alpha(grid: &ChebGrid) -> (f64, f64) {
    let (lo, hi) = scan_bracket(|a| lowest_eigenvalue(a, grid), -5.0, 0.0, 50);
    let (alpha, theta) = golden_section(|a| lowest_eigenvalue(a, grid), lo, hi, 1e-9);
    // Sharpen on the stationarity condition ∂λ/∂α = 0.
    match secant(|a| lowest_pair(a, grid).1, alpha - 1e-4, alpha + 1e-4, lo, hi, 1e-14) {
        Some(a) => (lowest_eigenvalue(a, grid), a),
        None => (theta, alpha),
    }
}

/// `Θ₀ = min_α λ₁(α)` with the minimizing `α`, checked under grid refinement.
pub fn theta0(spec: HalfLineGrid) -> Result<Theta0> {
    if spec.t_max < 10.0 {
        return Err(Error::invalid(format!("half-line length {} < 10", spec.t_max)));
    }
    if spec.nodes < 32 {
        return Err(Error::invalid("at least 32 Chebyshev nodes are needed"));
    }
    let (theta, alpha) = minimize_over_alpha(&ChebGrid::new(spec.nodes, spec.t_max));
    let (fine, _) = minimize_over_alpha(&ChebGrid::new(spec.nodes * 3 / 2, spec.t_max));
    let change = (fine - theta).abs();
    if change > 1e-5 {
        return Err(Error::convergence(format!(
            "Θ₀ not converged under refinement: {theta} vs {fine} with {} nodes",
            spec.nodes
        )));
    }
    Ok(Theta0 { theta0: theta, alpha0: alpha, refinement_change: change })
}

/// `Θ₀` on the default grid, computed once.
pub(crate) fn theta0_default() -> f64 {
    static CELL: OnceLock<f64> = OnceLock::new();
    *CELL.get_or_init(|| theta0(HalfLineGrid::default()).map(|t| t.theta0).unwrap_or(0.590_106_125))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn de_gennes_constant() {
        let t = theta0(HalfLineGrid::default()).unwrap();
        assert!((1.0 / t.theta0 - 1.6946).abs() < 1e-3);
        assert!(t.theta0 <= 1.0);
        // The minimizing shift satisfies α₀² = Θ₀.
        assert!((t.alpha0 * t.alpha0 - t.theta0).abs() < 1e-6, "{t:?}");
        assert!(t.refinement_change < 1e-9);
    }

    #[test]
    fn even_reflection_gives_full_line_oscillator() {
        let g = ChebGrid::new(96, 12.0);
        assert!((lowest_eigenvalue(0.0, &g) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn convex_near_minimizer() {
        let g = ChebGrid::new(96, 12.0);
        let t = theta0(HalfLineGrid::default()).unwrap();
        let h = 1e-2;
        let second = lowest_eigenvalue(t.alpha0 + h, &g) - 2.0 * t.theta0 + lowest_eigenvalue(t.alpha0 - h, &g);
        assert!(second > 0.0);
    }

    #[test]
    fn rejects_short_domain() {
        assert!(theta0(HalfLineGrid { t_max: 5.0, nodes: 64 }).is_err());
    }
}
