//! Mean-field free energy of the quasi-hole plasma,
//! `E[ρ] = ∫ V_m ρ + ℓ D(ρ, ρ) + N⁻¹ ∫ ρ log ρ`, with
//! `V_m = r² − 2(m/N) log r` and `D(ρ, ρ) = ∬ −log|x − y| ρ(x) ρ(y)`.
//!
//! Radial densities are taken piecewise constant on cells uniform in
//! `x = r²`. Newton's theorem makes `D` exact on that class:
//! `D = −∫ log x · M(x) dμ(x)` with `M` the radial mass function. Written in the
//! cumulative masses `M_i` every term couples neighbouring cells only, so the
//! Hessian is tridiagonal and Newton steps cost `O(K)`.

use std::f64::consts::PI;

use super::equilibrium::{EquilibriumMeasure, RadialLaw};
use crate::numerics::linalg::solve_tridiagonal;
use crate::numerics::optimize::bisect;
use crate::numerics::quadrature::gauss_legendre;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiholeGrid {
    pub cells: usize,
    /// Optional hard limit on the radial domain.
    pub r_max: Option<f64>,
}

impl Default for QuasiholeGrid {
    fn default() -> Self {
        QuasiholeGrid { cells: 2000, r_max: None }
    }
}

/// Cells where `N(Φ − min Φ)` exceeds this carry no mass.
const WINDOW: f64 = 60.0;

struct Problem {
    inv_n: f64,
    ell: f64,
    log_cell_area: f64,
    v: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Problem {
    /// Cell `i` with inner mass `u` and own mass `p`: value, derivatives in
    /// `(M_{i−1}, M_i)` and the Hessian entries `(uu, uw, ww)`.
    fn cell(&self, i: usize, u: f64, p: f64) -> (f64, [f64; 2], [f64; 3]) {
        let (v, a, b, l) = (self.v[i], self.a[i], self.b[i], self.ell);
        let lg = p.ln() - self.log_cell_area;
        let t = p * v - l * (u * p * a + p * p * b) + self.inv_n * p * lg;
        let dw = v - l * (u * a + 2.0 * p * b) + self.inv_n * (lg + 1.0);
        let du = -v - l * (a * (p - u) - 2.0 * p * b) - self.inv_n * (lg + 1.0);
        let e = self.inv_n / p;
        (t, [du, dw], [2.0 * l * (a - b) + e, -l * (a - 2.0 * b) - e, -2.0 * l * b + e])
    }

    fn energy(&self, p: &[f64]) -> f64 {
        let mut u = 0.0;
        let mut e = 0.0;
        for (i, &q) in p.iter().enumerate() {
            e += self.cell(i, u, q).0;
            u += q;
        }
        e
    }

    /// Gradient and tridiagonal Hessian in the interior cumulative masses.
    fn derivatives(&self, p: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let k = self.v.len();
        let mut u = 0.0;
        let mut g = vec![0.0; k - 1];
        let mut diag = vec![0.0; k - 1];
        let mut off = vec![0.0; k.saturating_sub(2)];
        for i in 0..k {
            let (_, d, h) = self.cell(i, u, p[i]);
            u += p[i];
            // unknown j ↔ c[j], j = 1..k−1, stored at j − 1
            if i >= 1 {
                g[i - 1] += d[0];
                diag[i - 1] += h[0];
            }
            if i + 1 <= k - 1 {
                g[i] += d[1];
                diag[i] += h[2];
            }
            if i >= 1 && i + 1 <= k - 1 {
                off[i - 1] += h[1];
            }
        }
        (g, diag, off)
    }
}

/// `Φ(x) − Φ(x₁)` for the zero-temperature annulus, `x = r²`.
fn effective_potential_gap(x: f64, gamma: f64, ell: f64) -> f64 {
    let (x1, x2) = (gamma, gamma + ell);
    let log_ratio = |y: f64, z: f64| if gamma == 0.0 { 0.0 } else { gamma * (y / z).ln() };
    if x > x2 {
        x - x2 - log_ratio(x, x2) - ell * (x / x2).ln()
    } else if x < x1 {
        x - x1 - log_ratio(x, x1)
    } else {
        0.0
    }
}

/// Radial minimizer of the quasi-hole mean-field free energy.
pub fn quasihole_mf_density(n: usize, m: u64, ell: u32, grid: &QuasiholeGrid) -> Result<EquilibriumMeasure> {
    if n == 0 || ell == 0 {
        return Err(Error::domain("need N ≥ 1 and ℓ ≥ 1"));
    }
    if grid.cells < 8 {
        return Err(Error::invalid("need at least 8 cells"));
    }
    let nn = n as f64;
    let l = ell as f64;
    let gamma = m as f64 / nn;
    let (x1, x2) = (gamma, gamma + l);

    let gap = |x: f64| nn * effective_potential_gap(x, gamma, l) - WINDOW;
    let mut hi = x2 + 1.0;
    while gap(hi) < 0.0 {
        hi = x2 + 2.0 * (hi - x2);
    }
    let mut xb = bisect(gap, x2, hi, 1e-12 * hi).unwrap_or(hi);
    if let Some(r) = grid.r_max {
        if r * r < x2 {
            return Err(Error::domain(format!("grid radius {r} does not contain the outer radius {}", x2.sqrt())));
        }
        xb = xb.min(r * r);
    }
    let mut xa = if gamma > 0.0 { bisect(gap, f64::MIN_POSITIVE, x1, 1e-14 * x1).unwrap_or(0.0) } else { 0.0 };
    if xa < 0.5 * (xb - xa) / grid.cells as f64 {
        xa = 0.0;
    }

    let k = grid.cells;
    let dx = (xb - xa) / k as f64;
    let edges: Vec<f64> = (0..=k).map(|i| xa + i as f64 * dx).collect();
    let (gt, gw) = gauss_legendre(12, 0.0, 1.0);
    let mut a = vec![0.0; k];
    let mut b = vec![0.0; k];
    for i in 0..k {
        if edges[i] == 0.0 {
            a[i] = dx.ln() - 1.0;
            b[i] = 0.5 * dx.ln() - 0.25;
        } else {
            for (&t, &w) in gt.iter().zip(&gw) {
                let lg = (edges[i] + t * dx).ln();
                a[i] += w * lg;
                b[i] += w * t * lg;
            }
        }
    }
    let v: Vec<f64> = (0..k).map(|i| 0.5 * (edges[i] + edges[i + 1]) - gamma * a[i]).collect();
    let prob = Problem { inv_n: 1.0 / nn, ell: l, log_cell_area: (PI * dx).ln(), v, a, b };

    // Start from the annulus with Boltzmann tails.
    let mut p: Vec<f64> = (0..k)
        .map(|i| {
            let (lo, hi) = (edges[i], edges[i + 1]);
            let overlap = (hi.min(x2) - lo.max(x1)).max(0.0) / l;
            let mid = 0.5 * (lo + hi);
            overlap + dx / l * (-nn * effective_potential_gap(mid, gamma, l)).exp().max(1e-250)
        })
        .collect();
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|q| *q /= total);

    // Newton steps are computed in the cumulative masses but applied to the
    // cell masses, which keeps tail cells far below 1e-16 representable.
    let mut energy = prob.energy(&p);
    let mut converged = false;
    for _ in 0..200 {
        let (g, diag, off) = prob.derivatives(&p);
        let rhs: Vec<f64> = g.iter().map(|x| -x).collect();
        let lower: Vec<f64> = std::iter::once(0.0).chain(off.iter().copied()).collect();
        let upper: Vec<f64> = off.iter().copied().chain(std::iter::once(0.0)).collect();
        let step = solve_tridiagonal(&lower, &diag, &upper, &rhs)
            .filter(|s| s.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>() < 0.0)
            .unwrap_or_else(|| g.iter().zip(&diag).map(|(x, h)| -x / h.abs().max(1e-12)).collect());
        let decrement = -step.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>();
        if decrement < 1e-24 {
            converged = true;
            break;
        }
        let dp: Vec<f64> = (0..k)
            .map(|i| {
                let du = if i >= 1 { step[i - 1] } else { 0.0 };
                let dw = if i + 1 < k { step[i] } else { 0.0 };
                dw - du
            })
            .collect();
        // Largest step keeping every cell mass positive.
        let mut t: f64 = 1.0;
        for (q, d) in p.iter().zip(&dp) {
            if *d < 0.0 {
                t = t.min(0.99 * q / -d);
            }
        }
        let mut accepted = false;
        while t > 1e-12 {
            let trial: Vec<f64> = p.iter().zip(&dp).map(|(q, d)| q + t * d).collect();
            let e = prob.energy(&trial);
            if e <= energy - 1e-4 * t * decrement {
                p = trial;
                energy = e;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // Decrease below roundoff of the energy sum.
            converged = decrement < 1e-12 * energy.abs().max(1.0);
            break;
        }
    }
    if !converged {
        return Err(Error::convergence("quasi-hole mean-field Newton iteration"));
    }
    let total: f64 = p.iter().sum();
    let masses: Vec<f64> = p.iter().map(|q| q / total).collect();
    let radii: Vec<f64> = edges.iter().map(|x| x.sqrt()).collect();
    Ok(EquilibriumMeasure { d: 2, law: RadialLaw::Shells { edges: radii, masses } })
}
