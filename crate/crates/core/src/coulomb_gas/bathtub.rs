//! Bath-tub energies `inf { ∫ V ρ : 0 ≤ ρ ≤ cap, ∫ ρ = mass }` on a grid, and
//! the optimal giant-vortex degree of the rotating quasi-hole states.

use std::f64::consts::PI;

use super::equilibrium::{EquilibriumMeasure, RadialLaw};
use super::hamiltonian::Potential;
use crate::{Error, Result};

/// A grid function: cell values of `V` and cell volumes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCells {
    pub values: Vec<f64>,
    pub volumes: Vec<f64>,
    /// Radial cell edges when the cells are 2D shells.
    pub radial_edges: Option<Vec<f64>>,
}

/// 2D shells uniform in `r²` on `[0, r_max]`, each carrying the exact
/// average of `V` over the shell.
pub fn radial_cells(v: &Potential, r_max: f64, cells: usize) -> GridCells {
    let dx = r_max * r_max / cells as f64;
    let xs: Vec<f64> = (0..=cells).map(|i| i as f64 * dx).collect();
    // ∫ log x dx = x log x − x
    let g = |x: f64| if x == 0.0 { 0.0 } else { x * x.ln() - x };
    let values = xs
        .windows(2)
        .map(|w| match *v {
            Potential::Zero => 0.0,
            Potential::Power { s, scale } => {
                let q = 0.5 * s + 1.0;
                scale * (w[1].powf(q) - w[0].powf(q)) / (q * dx)
            }
            Potential::LogPerturbed { gamma, scale } => {
                // log r = ½ log x
                scale * (0.5 * (w[0] + w[1]) - gamma * (g(w[1]) - g(w[0])) / dx)
            }
        })
        .collect();
    GridCells { values, volumes: vec![PI * dx; cells], radial_edges: Some(xs.iter().map(|x| x.sqrt()).collect()) }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BathtubResult {
    pub energy: f64,
    /// Density in each cell.
    pub rho: Vec<f64>,
    /// Filling level `t*`.
    pub level: f64,
}

impl BathtubResult {
    /// The minimizer as a radial measure, for radial cells.
    pub fn to_measure(&self, cells: &GridCells) -> Option<EquilibriumMeasure> {
        let edges = cells.radial_edges.clone()?;
        let total: f64 = self.rho.iter().zip(&cells.volumes).map(|(r, v)| r * v).sum();
        let masses = self.rho.iter().zip(&cells.volumes).map(|(r, v)| r * v / total).collect();
        Some(EquilibriumMeasure { d: 2, law: RadialLaw::Shells { edges, masses } })
    }
}

/// Fills cells in increasing order of `V` up to `cap`; ties are filled in
/// index order. `cap = ∞` puts all the mass in the first minimal cell.
pub fn bathtub(cells: &GridCells, cap: f64, mass: f64) -> Result<BathtubResult> {
    let n = cells.values.len();
    if n == 0 || cells.volumes.len() != n {
        return Err(Error::invalid("values and volumes must be non-empty and of equal length"));
    }
    if !(cap > 0.0) || !(mass >= 0.0) {
        return Err(Error::domain("cap must be positive and mass non-negative"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| cells.values[a].total_cmp(&cells.values[b]).then(a.cmp(&b)));
    let mut rho = vec![0.0; n];
    if cap.is_infinite() {
        let i = order[0];
        rho[i] = mass / cells.volumes[i];
        return Ok(BathtubResult { energy: mass * cells.values[i], rho, level: cells.values[i] });
    }
    let capacity: f64 = cap * cells.volumes.iter().sum::<f64>();
    if capacity < mass * (1.0 - 1e-12) {
        return Err(Error::domain(format!("cap·volume = {capacity} cannot hold mass {mass}")));
    }
    let mut left = mass;
    let mut energy = 0.0;
    let mut level = cells.values[order[0]];
    for &i in &order {
        if left <= 1e-12 * mass {
            break;
        }
        let take = (cap * cells.volumes[i]).min(left);
        rho[i] = take / cells.volumes[i];
        energy += take * cells.values[i];
        left -= take;
        level = cells.values[i];
    }
    Ok(BathtubResult { energy, rho, level })
}

/// `m_opt = 0` if `ω ≥ −2kN`, otherwise `−ω/(2k) − N` rounded to the nearest
/// non-negative integer.
pub fn optimal_quasihole_degree(omega: f64, k: f64, n: u64) -> Result<u64> {
    if !(k > 0.0) || n == 0 {
        return Err(Error::domain("need k > 0 and N ≥ 1"));
    }
    if omega >= -2.0 * k * n as f64 {
        return Ok(0);
    }
    Ok((-omega / (2.0 * k) - n as f64).round().max(0.0) as u64)
}
