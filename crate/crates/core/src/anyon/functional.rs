//! Energy, exact discrete gradient and constrained minimization.
//!
//! With `D` the spectral derivative, `J = Im(ū Du)` and `ρ = |u|²`, the
//! discrete energy is
//! `E = h² Σ |Du|² + Vρ + 2β A·J + β²|A|²ρ`.
//! Its gradient for `⟨a, b⟩ = h² Re Σ ā b` is `2G` with
//! `G = −D·Du + W u − iβ (A·Du + D·(A u))`,
//! `W = V + β²|A|² − 2β Φ`, `Φ = ∇^⊥w_R ⋆ (J + βρA)`.
//! The second and third terms of `G` come from `A` depending on `|u|²`;
//! `K(−x) = −K(x)` turns the transpose of the convolution into a minus sign.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::field::{Fft2, GaugeSolver, Grid, GridField2D};
use crate::numerics::rng::stream_rng;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum TrapPotential {
    Harmonic,
    /// `|x|^s`.
    Power(f64),
}

impl TrapPotential {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let r2 = x * x + y * y;
        match *self {
            TrapPotential::Harmonic => r2,
            TrapPotential::Power(s) => r2.powf(0.5 * s),
        }
    }

    fn exponent(&self) -> f64 {
        match *self {
            TrapPotential::Harmonic => 2.0,
            TrapPotential::Power(s) => s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AfParams {
    pub beta: f64,
    /// Radius `R` of the extended anyons.
    pub radius: f64,
    pub potential: TrapPotential,
}

impl AfParams {
    /// `β = α (N − 1)` for `N` anyons of statistics parameter `α`.
    pub fn from_anyons(alpha: f64, n: usize, radius: f64, potential: TrapPotential) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain("need at least two anyons"));
        }
        Ok(Self { beta: alpha * (n - 1) as f64, radius, potential })
    }

    pub fn validate(&self) -> Result<()> {
        if !self.beta.is_finite() {
            return Err(Error::domain("β must be finite"));
        }
        if !(self.radius >= 0.0) {
            return Err(Error::domain("R must be ≥ 0"));
        }
        if !(self.potential.exponent() > 0.0) {
            return Err(Error::domain("the trap |x|^s needs s > 0"));
        }
        Ok(())
    }

    /// Box half-width for which the `β = 0` ground state has boundary
    /// amplitude about `1e-8`: `∫_0^L √V = log 1e8`, widened by `(1 + |β|)^{1/4}`
    /// for the spreading caused by the average field.
    pub fn default_box(&self) -> f64 {
        let q = 1.0 + 0.5 * self.potential.exponent();
        (1e8f64.ln() * q).powf(1.0 / q) * (1.0 + self.beta.abs()).powf(0.25)
    }
}

/// The discretized functional on a fixed grid.
#[derive(Clone)]
pub struct AfFunctional {
    pub params: AfParams,
    pub grid: Grid,
    solver: GaugeSolver,
    fft: Fft2,
    kx: Vec<f64>,
    v: Vec<f64>,
}

type CVec = Vec<Complex64>;

impl AfFunctional {
    pub fn new(params: AfParams, grid: Grid) -> Result<Self> {
        params.validate()?;
        let solver = GaugeSolver::new(grid, params.radius)?;
        let v = (0..grid.len())
            .map(|k| {
                let (x, y) = grid.point(k);
                params.potential.eval(x, y)
            })
            .collect();
        Ok(Self { params, grid, solver, fft: Fft2::new(grid.n), kx: grid.wavenumbers(), v })
    }

    /// `(D_x f, D_y f)`.
    fn gradient_of(&self, f: &[Complex64]) -> (CVec, CVec) {
        let n = self.grid.n;
        let mut hat = f.to_vec();
        self.fft.forward(&mut hat);
        let mut dx = hat.clone();
        let mut dy = hat;
        for i in 0..n {
            for j in 0..n {
                dx[i * n + j] *= Complex64::new(0.0, self.kx[i]);
                dy[i * n + j] *= Complex64::new(0.0, self.kx[j]);
            }
        }
        self.fft.inverse(&mut dx);
        self.fft.inverse(&mut dy);
        (dx, dy)
    }

    /// `D_x f + D_y g`.
    fn divergence_of(&self, f: &[Complex64], g: &[Complex64]) -> CVec {
        let n = self.grid.n;
        let mut a = f.to_vec();
        let mut b = g.to_vec();
        self.fft.forward(&mut a);
        self.fft.forward(&mut b);
        for i in 0..n {
            for j in 0..n {
                let k = i * n + j;
                a[k] = Complex64::new(0.0, self.kx[i]) * a[k] + Complex64::new(0.0, self.kx[j]) * b[k];
            }
        }
        self.fft.inverse(&mut a);
        a
    }

    fn check(&self, u: &GridField2D) -> Result<()> {
        if u.grid != self.grid {
            return Err(Error::invalid("field and functional live on different grids"));
        }
        Ok(())
    }

    pub fn energy(&self, u: &GridField2D) -> Result<f64> {
        self.check(u)?;
        Ok(self.evaluate(&u.values, false).0)
    }

    /// Energy and its gradient for `⟨a, b⟩ = h² Re Σ ā b`.
    pub fn energy_and_gradient(&self, u: &GridField2D) -> Result<(f64, CVec)> {
        self.check(u)?;
        let (e, g) = self.evaluate(&u.values, true);
        Ok((e, g.expect("gradient requested")))
    }

    fn evaluate(&self, u: &[Complex64], want_gradient: bool) -> (f64, Option<CVec>) {
        let beta = self.params.beta;
        let h2 = self.grid.h().powi(2);
        let rho: Vec<f64> = u.iter().map(|z| z.norm_sqr()).collect();
        let (dx, dy) = self.gradient_of(u);
        let (ax, ay) = if beta != 0.0 { self.solver.convolve(&rho) } else { (vec![0.0; u.len()], vec![0.0; u.len()]) };
        let jx: Vec<f64> = u.iter().zip(&dx).map(|(a, b)| (a.conj() * b).im).collect();
        let jy: Vec<f64> = u.iter().zip(&dy).map(|(a, b)| (a.conj() * b).im).collect();
        let mut e = 0.0;
        for k in 0..u.len() {
            let a2 = ax[k] * ax[k] + ay[k] * ay[k];
            e += dx[k].norm_sqr() + dy[k].norm_sqr() + self.v[k] * rho[k] + 2.0 * beta * (ax[k] * jx[k] + ay[k] * jy[k]) + beta * beta * a2 * rho[k];
        }
        e *= h2;
        if !want_gradient {
            return (e, None);
        }
        let lap = self.divergence_of(&dx, &dy);
        let mut g: CVec = (0..u.len()).map(|k| -lap[k] + self.v[k] * u[k]).collect();
        if beta != 0.0 {
            let gx: Vec<f64> = (0..u.len()).map(|k| jx[k] + beta * rho[k] * ax[k]).collect();
            let gy: Vec<f64> = (0..u.len()).map(|k| jy[k] + beta * rho[k] * ay[k]).collect();
            let phi = self.solver.convolve_dot(&gx, &gy);
            let axu: CVec = (0..u.len()).map(|k| u[k] * ax[k]).collect();
            let ayu: CVec = (0..u.len()).map(|k| u[k] * ay[k]).collect();
            let div_au = self.divergence_of(&axu, &ayu);
            let mi = Complex64::new(0.0, -beta);
            for k in 0..u.len() {
                let w = beta * beta * (ax[k] * ax[k] + ay[k] * ay[k]) - 2.0 * beta * phi[k];
                g[k] += w * u[k] + mi * (dx[k] * ax[k] + dy[k] * ay[k] + div_au[k]);
            }
        }
        for z in &mut g {
            *z *= 2.0;
        }
        (e, Some(g))
    }

    /// `(c + |k|²)^{-1} f`, the Sobolev preconditioner.
    fn precondition(&self, f: &[Complex64], c: f64) -> CVec {
        let n = self.grid.n;
        let mut hat = f.to_vec();
        self.fft.forward(&mut hat);
        for i in 0..n {
            for j in 0..n {
                hat[i * n + j] /= c + self.kx[i].powi(2) + self.kx[j].powi(2);
            }
        }
        self.fft.inverse(&mut hat);
        hat
    }

    fn inner(&self, a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x.conj() * y).re).sum::<f64>() * self.grid.h().powi(2)
    }
}

/// `E^af[u]` on the grid of `u`.
pub fn af_energy(u: &GridField2D, p: &AfParams) -> Result<f64> {
    AfFunctional::new(*p, u.grid)?.energy(u)
}

/// Relative mismatch between `⟨∇E, δu⟩` and the centred difference
/// `(E[u + εδu] − E[u − εδu])/(2ε)` at `ε = 1e-5`, for a random smooth-envelope `δu`.
pub fn gradient_check(f: &AfFunctional, u: &GridField2D, seed: u64) -> Result<f64> {
    let (_, g) = f.energy_and_gradient(u)?;
    let mut rng = stream_rng(seed, 7);
    let du: CVec = (0..u.values.len())
        .map(|k| {
            let (x, y) = f.grid.point(k);
            let env = (-(x * x + y * y) / 4.0).exp();
            env * Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        })
        .collect();
    let eps = 1e-5;
    let shifted = |s: f64| {
        let values = u.values.iter().zip(&du).map(|(a, b)| a + b * s).collect();
        f.energy(&GridField2D { grid: u.grid, values })
    };
    let fd = (shifted(eps)? - shifted(-eps)?) / (2.0 * eps);
    let an = f.inner(&g, &du);
    Ok((fd - an).abs() / an.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimizeOptions {
    /// Stop when the energy drops by less than `tol·|E|` over 50 iterations.
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
    pub max_iter: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self { tol: 1e-10, restarts: 2, seed: 0, max_iter: 5000 }
    }
}

#[derive(Debug, Clone)]
pub struct AfMinimum {
    pub energy: f64,
    pub u: GridField2D,
    pub iterations: usize,
    /// Final energy of every restart, in seed order.
    pub restart_energies: Vec<f64>,
    /// Gradient-check residual at the returned minimizer.
    pub gradient_residual: f64,
}

/// Smooth random start: a Gaussian times a random low-degree polynomial in `z`, `z̄`.
fn initial_guess(grid: Grid, seed: u64, restart: usize) -> GridField2D {
    let mut rng = stream_rng(seed, restart as u64);
    let mut coef = |s: f64| Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)) * s;
    let c: Vec<(Complex64, Complex64)> = (1..=3).map(|_| (coef(0.3), coef(0.3))).collect();
    let mut u = GridField2D::from_fn(grid, |x, y| {
        let z = Complex64::new(x, y);
        let mut p = Complex64::new(1.0, 0.0);
        for (j, (a, b)) in c.iter().enumerate() {
            p += a * z.powu(j as u32 + 1) + b * z.conj().powu(j as u32 + 1);
        }
        p * (-(x * x + y * y) / 2.0).exp()
    });
    u.normalize();
    u
}

/// Preconditioned nonlinear conjugate gradient (Polak-Ribière+) on the unit
/// sphere, retracting by normalization after each step.
fn descend(f: &AfFunctional, mut u: GridField2D, opts: &MinimizeOptions) -> Result<(f64, GridField2D, usize)> {
    let mut history = Vec::new();
    let (mut e, mut g) = f.energy_and_gradient(&u)?;
    let mut dir: Option<CVec> = None;
    let mut prev: Option<(CVec, CVec)> = None;
    let mut step: f64 = 0.1;
    for it in 0..opts.max_iter {
        history.push(e);
        if it >= 50 && history[it - 50] - e < opts.tol * e.abs() {
            return Ok((e, u, it));
        }
        // tangent projections of the gradient and the preconditioned gradient
        let ug = f.inner(&u.values, &g);
        let gt: CVec = g.iter().zip(&u.values).map(|(a, b)| a - b * ug).collect();
        let c = 1.0 + (e.abs()).min(50.0);
        let z = f.precondition(&gt, c);
        let uz = f.inner(&u.values, &z);
        let zt: CVec = z.iter().zip(&u.values).map(|(a, b)| a - b * uz).collect();
        let mut d: CVec = zt.iter().map(|x| -x).collect();
        if let (Some(old), Some((g0, z0))) = (&dir, &prev) {
            let num = f.inner(&gt, &zt) - f.inner(&gt, z0);
            let gamma = (num / f.inner(g0, z0)).max(0.0);
            let uo = f.inner(&u.values, old);
            for (k, dk) in d.iter_mut().enumerate() {
                *dk += (old[k] - u.values[k] * uo) * gamma;
            }
        }
        let mut slope = f.inner(&gt, &d);
        if slope >= 0.0 {
            d = zt.iter().map(|x| -x).collect();
            slope = f.inner(&gt, &d);
        }
        if slope.abs() < 1e-15 * e.abs().max(1.0) {
            return Ok((e, u, it));
        }
        let try_step = |t: f64| {
            let mut v = GridField2D { grid: u.grid, values: u.values.iter().zip(&d).map(|(a, b)| a + b * t).collect() };
            v.normalize();
            let ev = f.energy(&v).unwrap_or(f64::INFINITY);
            (ev, v)
        };
        let mut t = (step * 2.0).min(10.0);
        let mut accepted = None;
        for _ in 0..50 {
            let (ev, v) = try_step(t);
            if ev <= e + 1e-4 * t * slope {
                accepted = Some((t, v));
                break;
            }
            t *= 0.5;
        }
        let Some((t, v)) = accepted else {
            // no decrease left above roundoff: converged
            if history.len() > 1 && (history[history.len().saturating_sub(10)] - e).abs() <= 1e-12 * e.abs() {
                return Ok((e, u, it));
            }
            return Err(Error::convergence(format!(
                "line search failed at iteration {it}: E = {e}, slope = {slope:.3e}, last energies {:?}",
                &history[history.len().saturating_sub(5)..]
            )));
        };
        step = t;
        u = v;
        prev = Some((gt, zt));
        dir = Some(d);
        let (e2, g2) = f.energy_and_gradient(&u)?;
        e = e2;
        g = g2;
    }
    Ok((e, u, opts.max_iter))
}

/// Minimizes `E^af` over `∫|u|² = 1` from `opts.restarts` seeded starts
/// (run in parallel) and returns the lowest.
pub fn minimize_af(p: &AfParams, grid: Grid, opts: &MinimizeOptions) -> Result<AfMinimum> {
    if !(p.radius > 0.0) {
        return Err(Error::domain("minimization needs extended anyons, R > 0"));
    }
    if opts.restarts == 0 {
        return Err(Error::domain("need at least one restart"));
    }
    let f = AfFunctional::new(*p, grid)?;
    let runs: Vec<Result<(f64, GridField2D, usize)>> =
        (0..opts.restarts).into_par_iter().map(|r| descend(&f, initial_guess(grid, opts.seed, r), opts)).collect();
    let runs: Vec<(f64, GridField2D, usize)> = runs.into_iter().collect::<Result<_>>()?;
    let restart_energies: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let best = (0..runs.len()).min_by(|&a, &b| runs[a].0.total_cmp(&runs[b].0).then(a.cmp(&b))).expect("restarts ≥ 1");
    let (energy, u, iterations) = runs.into_iter().nth(best).expect("index in range");
    let ratio = u.boundary_ratio();
    if ratio > 1e-6 {
        return Err(Error::domain(format!("minimizer reaches the box boundary ({ratio:.2e}); enlarge L")));
    }
    let gradient_residual = gradient_check(&f, &u, opts.seed)?;
    Ok(AfMinimum { energy, u, iterations, restart_energies, gradient_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params(beta: f64) -> AfParams {
        AfParams { beta, radius: 0.25, potential: TrapPotential::Harmonic }
    }

    fn grid_for(p: &AfParams, n: usize) -> Grid {
        Grid::new(n, p.default_box()).unwrap()
    }

    fn oscillator(grid: Grid) -> GridField2D {
        GridField2D::from_fn(grid, |x, y| Complex64::new((-(x * x + y * y) / 2.0).exp() / PI.sqrt(), 0.0))
    }

    #[test]
    fn harmonic_ground_state_energy() {
        let p = params(0.0);
        let u = oscillator(grid_for(&p, 64));
        assert!((u.mass() - 1.0).abs() < 1e-10);
        assert!((af_energy(&u, &p).unwrap() - 2.0).abs() < 1e-8);
        assert!(u.boundary_ratio() < 1e-7);
    }

    #[test]
    fn real_fields_have_no_cross_term() {
        let p = params(1.3);
        let grid = grid_for(&p, 64);
        let u = oscillator(grid);
        let f = AfFunctional::new(p, grid).unwrap();
        let a = f.solver.gauge_field(&u.density()).unwrap();
        let h2 = grid.h().powi(2);
        let extra: f64 = (0..grid.len()).map(|k| (a.ax[k].powi(2) + a.ay[k].powi(2)) * u.values[k].norm_sqr()).sum::<f64>() * h2;
        let lhs = af_energy(&u, &p).unwrap();
        let rhs = af_energy(&u, &params(0.0)).unwrap() + p.beta * p.beta * extra;
        assert!((lhs - rhs).abs() < 1e-10 * lhs);
    }

    #[test]
    fn diamagnetic_inequality_on_random_fields() {
        for beta in [0.5, 1.0, 2.0] {
            let p = params(beta);
            let grid = grid_for(&p, 64);
            for s in 0..20 {
                let u = initial_guess(grid, 100 + s, 0);
                let modulus = GridField2D { grid, values: u.values.iter().map(|z| Complex64::new(z.norm(), 0.0)).collect() };
                assert!(af_energy(&u, &p).unwrap() >= af_energy(&modulus, &params(0.0)).unwrap());
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        for beta in [0.0, 0.7, -1.5] {
            let p = params(beta);
            let grid = grid_for(&p, 64);
            let f = AfFunctional::new(p, grid).unwrap();
            for s in 0..3 {
                let res = gradient_check(&f, &initial_guess(grid, s, 1), s).unwrap();
                assert!(res < 1e-5, "β = {beta}: residual {res}");
            }
        }
    }

    #[test]
    fn minimization_is_radial_even_and_above_bosons() {
        let opts = MinimizeOptions { restarts: 1, ..Default::default() };
        let p0 = params(0.0);
        let m0 = minimize_af(&p0, grid_for(&p0, 48), &opts).unwrap();
        assert!((m0.energy - 2.0).abs() < 0.02 * 2.0, "{}", m0.energy);
        let p = params(1.0);
        let grid = grid_for(&p, 48);
        let plus = minimize_af(&p, grid, &opts).unwrap();
        let minus = minimize_af(&params(-1.0), grid, &opts).unwrap();
        assert!(plus.energy >= m0.energy);
        assert!((plus.energy - minus.energy).abs() < 1e-6 * plus.energy);
        assert!(plus.gradient_residual < 1e-5);
        let spread = plus.u.angular_spread(&[0.5, 1.0, 1.5]);
        assert!(spread < 0.01, "angular spread {spread}");
        assert!(minimize_af(&AfParams { radius: 0.0, ..p }, grid, &opts).is_err());
    }

    #[test]
    fn energy_is_continuous_as_radius_shrinks() {
        let p = params(1.0);
        let grid = grid_for(&p, 64);
        let u = initial_guess(grid, 3, 0);
        let e: Vec<f64> = [0.5, 0.25, 0.125, 0.0625]
            .iter()
            .map(|&radius| af_energy(&u, &AfParams { radius, ..p }).unwrap())
            .collect();
        let jumps: Vec<f64> = e.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        assert!(jumps[0] < 0.05 * e[0], "{e:?}");
        assert!(jumps[1] < jumps[0] && jumps[2] < jumps[1], "{jumps:?}");
    }
}
