use nalgebra::{DMatrix, DVector};

use super::theta0::theta0_default;
use crate::numerics::chebyshev::{interpolate_cgl, ChebGrid};
use crate::numerics::optimize::{golden_section, scan_bracket, secant};
use crate::{Error, Result};

/// Parameters of the reduced GL functional
/// `E_{k,α}[f] = ∫ (1−εkt){ f'² + (t+α−½εkt²)²/(1−εkt)² f² + (f⁴−2f²)/(2b) }`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlParams {
    pub b: f64,
    pub k: f64,
    pub eps: f64,
    pub c0: f64,
}

impl GlParams {
    pub fn flat(b: f64) -> Self {
        GlParams { b, k: 0.0, eps: 1e-3, c0: 2.0 }
    }

    /// `c₀ |log ε|`, the truncation length of the curved problem.
    pub fn curved_length(&self) -> f64 {
        self.c0 * self.eps.ln().abs()
    }

    fn validate(&self, t_max: f64) -> Result<()> {
        let upper = 1.0 / theta0_default();
        if !(self.b > 1.0 && self.b < upper) {
            return Err(Error::domain(format!("b = {} outside (1, Θ₀⁻¹ = {upper:.6})", self.b)));
        }
        if !(self.eps > 0.0) || !(self.c0 > 0.0) {
            return Err(Error::domain("eps and c0 must be positive"));
        }
        if self.eps * self.k * t_max >= 1.0 {
            return Err(Error::domain(format!("εk·T = {} ≥ 1: the weight 1−εkt changes sign", self.eps * self.k * t_max)));
        }
        Ok(())
    }
}

/// Discretization of the half-line GL problems.
///
/// `t_flat` is the domain length used when `k = 0`; curved problems use
/// `c₀|log ε|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gl1dGrid {
    pub nodes: usize,
    pub t_flat: f64,
}

impl Default for Gl1dGrid {
    fn default() -> Self {
        Gl1dGrid { nodes: 120, t_flat: 12.0 }
    }
}

/// A half-line profile `f ≥ 0` on Chebyshev nodes together with its phase `α`.
#[derive(Debug, Clone)]
pub struct Profile1D {
    pub t: Vec<f64>,
    pub f: Vec<f64>,
    /// Clenshaw-Curtis weights on `[0, t_max]`.
    pub weights: Vec<f64>,
    pub alpha: f64,
    pub t_max: f64,
}

impl Profile1D {
    pub fn eval(&self, t: f64) -> f64 {
        if !(0.0..=self.t_max).contains(&t) {
            return 0.0;
        }
        interpolate_cgl(&self.t, &self.f, t)
    }

    /// Values on `n` equispaced points of `[0, t_max]`.
    pub fn resample(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let h = self.t_max / (n.max(2) - 1) as f64;
        let t: Vec<f64> = (0..n.max(2)).map(|i| i as f64 * h).collect();
        let f = t.iter().map(|&x| self.eval(x)).collect();
        (t, f)
    }

    pub fn integrate(&self, g: impl Fn(f64, f64) -> f64) -> f64 {
        self.t.iter().zip(&self.f).zip(&self.weights).map(|((&t, &f), &w)| w * g(t, f)).sum()
    }

    pub fn quartic_integral(&self) -> f64 {
        self.integrate(|_, f| f.powi(4))
    }

    /// Derivative values at the nodes.
    pub fn derivative(&self) -> Vec<f64> {
        let g = ChebGrid::new(self.t.len() - 1, self.t_max);
        (&g.diff * DVector::from_column_slice(&self.f)).as_slice().to_vec()
    }
}

#[derive(Debug, Clone)]
pub struct Gl1dMinimum {
    pub energy: f64,
    pub profile: Profile1D,
    pub newton_iterations: usize,
}

/// Discretized functional at fixed `α`, unknowns at all nodes except `t = T`.
struct GlProblem {
    grid: ChebGrid,
    b: f64,
    ek: f64,
    m: usize,
    stiffness: DMatrix<f64>,
    /// `W_q (1 − εk t_q)`
    wk: Vec<f64>,
}

impl GlProblem {
    fn new(p: &GlParams, t_max: f64, nodes: usize) -> Self {
        let grid = ChebGrid::new(nodes, t_max);
        let m = grid.len() - 1;
        let ek = p.eps * p.k;
        let wk: Vec<f64> = grid.weights.iter().zip(&grid.nodes).map(|(w, t)| w * (1.0 - ek * t)).collect();
        let d = grid.diff.columns(0, m);
        let mut stiffness = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let mut s = 0.0;
                for q in 0..grid.len() {
                    s += d[(q, i)] * wk[q] * d[(q, j)];
                }
                stiffness[(i, j)] = s;
                stiffness[(j, i)] = s;
            }
        }
        GlProblem { grid, b: p.b, ek, m, stiffness, wk }
    }

    /// `(t+α−½εkt²)² / (1−εkt)`, the potential including the weight.
    fn potential(&self, alpha: f64) -> Vec<f64> {
        self.grid.nodes[..self.m]
            .iter()
            .zip(&self.grid.weights)
            .map(|(&t, &w)| {
                let a = t + alpha - 0.5 * self.ek * t * t;
                w * a * a / (1.0 - self.ek * t)
            })
            .collect()
    }

    fn energy(&self, f: &DVector<f64>, pot: &[f64]) -> f64 {
        let kf = &self.stiffness * f;
        let mut e = f.dot(&kf);
        for i in 0..self.m {
            let fi = f[i];
            e += pot[i] * fi * fi + self.wk[i] * (fi.powi(4) - 2.0 * fi * fi) / (2.0 * self.b);
        }
        e
    }

    fn gradient(&self, f: &DVector<f64>, pot: &[f64]) -> DVector<f64> {
        let mut g = 2.0 * (&self.stiffness * f);
        for i in 0..self.m {
            let fi = f[i];
            g[i] += 2.0 * pot[i] * fi + 2.0 * self.wk[i] * (fi.powi(3) - fi) / self.b;
        }
        g
    }

    fn hessian(&self, f: &DVector<f64>, pot: &[f64]) -> DMatrix<f64> {
        let mut h = 2.0 * &self.stiffness;
        for i in 0..self.m {
            h[(i, i)] += 2.0 * pot[i] + 2.0 * self.wk[i] * (3.0 * f[i] * f[i] - 1.0) / self.b;
        }
        h
    }

    /// `∂E/∂α = ∫ 2(t+α−½εkt²)/(1−εkt) f²`, valid at a minimizer in `f`.
    fn alpha_derivative(&self, f: &DVector<f64>, alpha: f64) -> f64 {
        (0..self.m)
            .map(|i| {
                let t = self.grid.nodes[i];
                let a = t + alpha - 0.5 * self.ek * t * t;
                self.grid.weights[i] * 2.0 * a / (1.0 - self.ek * t) * f[i] * f[i]
            })
            .sum()
    }

    fn initial_guess(&self) -> DVector<f64> {
        DVector::from_iterator(self.m, self.grid.nodes[..self.m].iter().map(|t| (-0.5 * t * t).exp()))
    }

    /// Damped Newton with Levenberg shifts and Armijo backtracking.
    fn minimize_f(&self, alpha: f64, start: &DVector<f64>) -> Result<(f64, DVector<f64>, usize)> {
        let pot = self.potential(alpha);
        let mut f = if start.amax() < 1e-8 { self.initial_guess() } else { start.clone() };
        let mut e = self.energy(&f, &pot);
        let shift_diag = DVector::from_column_slice(&self.wk[..self.m]);
        for it in 0..300 {
            let g = self.gradient(&f, &pot);
            let h = self.hessian(&f, &pot);
            let mut tau = 0.0;
            let step = loop {
                let mut ht = h.clone();
                for i in 0..self.m {
                    ht[(i, i)] += tau * shift_diag[i];
                }
                if let Some(ch) = ht.cholesky() {
                    break -ch.solve(&g);
                }
                tau = if tau == 0.0 { 1e-6 } else { tau * 10.0 };
                if tau > 1e12 {
                    return Err(Error::convergence("GL Hessian could not be regularized"));
                }
            };
            let slope = g.dot(&step);
            let floor = 1e-13 * e.abs().max(1e-6);
            if -slope < floor {
                return Ok((e, f, it));
            }
            // Below this decrement the energy sits at its roundoff floor.
            let noisy = -slope < 1e-8 * e.abs().max(1e-6);
            let mut t = 1.0;
            loop {
                let trial = &f + t * &step;
                let et = self.energy(&trial, &pot);
                if noisy && et >= e {
                    return Ok((e, f, it));
                }
                if et <= e + 1e-4 * t * slope {
                    f = trial;
                    e = et;
                    if noisy {
                        return Ok((e, f, it + 1));
                    }
                    break;
                }
                t *= 0.5;
                if t < 1e-14 {
                    if noisy {
                        return Ok((e, f, it));
                    }
                    return Err(Error::convergence(format!(
                        "GL line search stalled at α = {alpha}: E = {e}, Newton decrement² = {}",
                        -slope
                    )));
                }
            }
        }
        Err(Error::convergence(format!("GL Newton did not converge at α = {alpha}")))
    }
}

/// Minimize over `(f, α)` on the domain `[0, t_max]`.
pub fn minimize_gl1d_on(p: &GlParams, t_max: f64, nodes: usize) -> Result<Gl1dMinimum> {
    p.validate(t_max)?;
    if nodes < 32 {
        return Err(Error::invalid("at least 32 Chebyshev nodes are needed"));
    }
    let prob = GlProblem::new(p, t_max, nodes);
    let mut warm = prob.initial_guess();
    let mut failure: Option<Error> = None;
    let mut eval = |alpha: f64, warm: &mut DVector<f64>| -> f64 {
        match prob.minimize_f(alpha, warm) {
            Ok((e, f, _)) => {
                *warm = f;
                e
            }
            Err(err) => {
                failure.get_or_insert(err);
                f64::INFINITY
            }
        }
    };
    let (lo, hi) = scan_bracket(|a| eval(a, &mut warm), -5.0, 0.0, 50);
    let (alpha_gs, _) = golden_section(|a| eval(a, &mut warm), lo, hi, 1e-8);
    if let Some(err) = failure {
        return Err(err);
    }

    // Sharpen α on the stationarity condition ∂E/∂α = 0.
    let (_, f_gs, _) = prob.minimize_f(alpha_gs, &warm)?;
    let mut alpha = alpha_gs;
    if f_gs.amax() > 1e-8 {
        let mut w = f_gs.clone();
        let refined = secant(
            |a| match prob.minimize_f(a, &w) {
                Ok((_, f, _)) => {
                    let d = prob.alpha_derivative(&f, a);
                    w = f;
                    d
                }
                Err(_) => f64::NAN,
            },
            alpha_gs - 1e-4,
            alpha_gs + 1e-4,
            lo,
            hi,
            1e-13,
        );
        if let Some(a) = refined {
            alpha = a;
        }
    }
    let (energy, f, iters) = prob.minimize_f(alpha, &f_gs)?;

    let mut values: Vec<f64> = f.iter().copied().collect();
    values.push(0.0);
    if values.iter().sum::<f64>() < 0.0 {
        values.iter_mut().for_each(|v| *v = -*v);
    }
    // The far tail carries solver noise of order 1e-9; f ≥ 0 is exact for the
    // continuum minimizer.
    values.iter_mut().for_each(|v| *v = v.max(0.0));
    Ok(Gl1dMinimum {
        energy,
        profile: Profile1D { t: prob.grid.nodes.clone(), f: values, weights: prob.grid.weights.clone(), alpha, t_max },
        newton_iterations: iters,
    })
}

/// `E^1D_*(k)` with its profile and phase. The domain is `c₀|log ε|` for
/// `k ≠ 0` and `grid.t_flat` otherwise.
pub fn minimize_gl1d(p: &GlParams, grid: Gl1dGrid) -> Result<Gl1dMinimum> {
    let t_max = if p.k == 0.0 { grid.t_flat } else { p.curved_length() };
    minimize_gl1d_on(p, t_max, grid.nodes)
}

/// `E^corr_α[f] = ∫ t{ f'² + f²(−α(t+α) − 1/b + f²/(2b)) }` over the profile's domain.
pub fn correction_energy(prof: &Profile1D, b: f64) -> f64 {
    let df = prof.derivative();
    let alpha = prof.alpha;
    prof.t
        .iter()
        .zip(&prof.f)
        .zip(&df)
        .zip(&prof.weights)
        .map(|(((&t, &f), &d), &w)| w * t * (d * d + f * f * (-alpha * (t + alpha) - 1.0 / b + f * f / (2.0 * b))))
        .sum()
}

#[derive(Debug, Clone)]
pub struct CurvatureConstants {
    pub b: f64,
    /// `∫ f₀⁴`
    pub c1: f64,
    /// `−2b E^1D_0`, equal to `c1` at the exact minimizer.
    pub c1_energy: f64,
    /// `(2/3) b f₀(0)² − 2b α₀ E^1D_0`
    pub c2: f64,
    /// `2b E^corr_{α₀}[f₀]`, equal to `c2` at the exact minimizer.
    pub c2_corr: f64,
    pub e0: f64,
    pub alpha0: f64,
    pub profile: Profile1D,
}

impl CurvatureConstants {
    pub fn c1_identity_error(&self) -> f64 {
        (self.c1_energy - self.c1).abs() / self.c1
    }
}

pub fn curvature_constants(b: f64, grid: Gl1dGrid) -> Result<CurvatureConstants> {
    let min = minimize_gl1d(&GlParams::flat(b), grid)?;
    let prof = min.profile;
    let e0 = min.energy;
    let f00 = prof.f[0];
    Ok(CurvatureConstants {
        b,
        c1: prof.quartic_integral(),
        c1_energy: -2.0 * b * e0,
        c2: 2.0 / 3.0 * b * f00 * f00 - 2.0 * b * prof.alpha * e0,
        c2_corr: 2.0 * b * correction_energy(&prof, b),
        e0,
        alpha0: prof.alpha,
        profile: prof,
    })
}
