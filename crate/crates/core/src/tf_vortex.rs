//! Thomas-Fermi profile of a rotating 2D condensate in the trap `|x|^s`, the
//! vortex cost function, the first critical speed and the limiting vortex
//! density with its renormalized energy.
//!
//! Everything is parametrized by the reduced rotation speed `omega0 = Ω/|log ε|`;
//! the small parameter itself never appears.

use std::f64::consts::PI;

use crate::numerics::linalg::solve_tridiagonal;
use crate::numerics::optimize::bisect;
use crate::numerics::quadrature::integrate;
use crate::{Error, Result};

/// Closed-form Thomas-Fermi density `½[λ − r^s]_+`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TfProfile {
    pub s: f64,
    pub lambda_tf: f64,
    pub r_tf: f64,
}

impl TfProfile {
    pub fn eval(&self, r: f64) -> f64 {
        if r.abs() >= self.r_tf {
            return 0.0;
        }
        0.5 * (self.lambda_tf - r.abs().powf(self.s)).max(0.0)
    }

    /// `ε² E^TF`, the Thomas-Fermi energy in scaled units.
    pub fn scaled_energy(&self) -> f64 {
        let s = self.s;
        PI * s / (4.0 * (s + 1.0)) * self.lambda_tf.powf(2.0 * (s + 1.0) / s)
    }

    /// `∂_r log ρ` inside the support.
    pub fn dlog(&self, r: f64) -> f64 {
        let s = self.s;
        -s * r.powf(s - 1.0) / (self.lambda_tf - r.powf(s))
    }

    /// `∂²_r log ρ` inside the support.
    pub fn d2log(&self, r: f64) -> f64 {
        let s = self.s;
        let g = self.lambda_tf - r.powf(s);
        -s * (s - 1.0) * r.powf(s - 2.0) / g - s * s * r.powf(2.0 * s - 2.0) / (g * g)
    }

    /// `∫_r^R t ρ(t) dt` in closed form.
    pub fn radial_tail(&self, r: f64) -> f64 {
        let r = r.clamp(0.0, self.r_tf);
        let (l, big_r, s) = (self.lambda_tf, self.r_tf, self.s);
        0.5 * (l * (big_r * big_r - r * r) / 2.0 - (big_r.powf(s + 2.0) - r.powf(s + 2.0)) / (s + 2.0))
    }
}

pub fn tf_profile(s: f64) -> Result<TfProfile> {
    if !(s >= 2.0) || !s.is_finite() {
        return Err(Error::domain(format!("trap exponent s = {s} must be finite and ≥ 2")));
    }
    let lambda_tf = (2.0 * (s + 2.0) / (PI * s)).powf(s / (s + 2.0));
    Ok(TfProfile { s, lambda_tf, r_tf: lambda_tf.powf(1.0 / s) })
}

/// `Ω₁ = (π/2) λ^TF`: above this speed `H^TF(0) < 0` and vortices pay off.
pub fn first_critical_speed(s: f64) -> Result<f64> {
    Ok(0.5 * PI * tf_profile(s)?.lambda_tf)
}

/// Potential `F^TF` and cost `H^TF = ½ρ^TF + F^TF` at a given rotation speed.
/// `Ω₁` as the root of `Ω ↦ H^TF_Ω(0)`, located by bisection on the
/// quadrature form of the cost; independent of the closed formula.
pub fn critical_speed_by_bisection(s: f64, tol: f64) -> Result<f64> {
    let p = tf_profile(s)?;
    let h0 = |omega: f64| CostData { profile: p, omega0: omega }.h_tf(0.0);
    let mut hi = 1.0;
    while h0(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::convergence("no sign change of H(0) below Ω = 1e6"));
        }
    }
    bisect(h0, 0.0, hi, tol).ok_or_else(|| Error::convergence("bisection for Ω₁ failed"))
}

#[derive(Debug, Clone, Copy)]
pub struct CostData {
    pub profile: TfProfile,
    pub omega0: f64,
}

impl CostData {
    /// `F^TF(r) = −Ω₀ ∫_r^R t ρ^TF(t) dt`, by adaptive Gauss-Kronrod.
    pub fn f_tf(&self, r: f64) -> f64 {
        let p = self.profile;
        if r >= p.r_tf {
            return 0.0;
        }
        let tail = integrate(|t| t * p.eval(t), r.max(0.0), p.r_tf, 1e-14, 1e-13)
            .unwrap_or_else(|_| p.radial_tail(r));
        -self.omega0 * tail
    }

    pub fn h_tf(&self, r: f64) -> f64 {
        0.5 * self.profile.eval(r) + self.f_tf(r)
    }

    /// Closed-form `F^TF`, used on dense grids.
    pub fn f_tf_exact(&self, r: f64) -> f64 {
        -self.omega0 * self.profile.radial_tail(r)
    }
}

pub fn cost_function(p: &TfProfile, omega0: f64) -> Result<CostData> {
    if !(omega0 > 0.0) || !omega0.is_finite() {
        return Err(Error::domain(format!("omega0 = {omega0} must be positive")));
    }
    Ok(CostData { profile: *p, omega0 })
}

/// Uniform vertex grid `r_i = i·h` on `[0, (1−δ)R^TF]`.
///
/// The cut `δ` keeps `1/ρ^TF` and `∂²_r log ρ^TF` bounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VortexGrid {
    pub points: usize,
    pub delta: f64,
}

impl Default for VortexGrid {
    fn default() -> Self {
        VortexGrid { points: 2001, delta: 1e-3 }
    }
}

impl VortexGrid {
    pub fn nodes(&self, p: &TfProfile) -> Result<Vec<f64>> {
        if self.points < 3 {
            return Err(Error::invalid("vortex grid needs at least 3 points"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid(format!("delta = {} must lie in (0, 1)", self.delta)));
        }
        let r_cut = (1.0 - self.delta) * p.r_tf;
        let h = r_cut / (self.points - 1) as f64;
        Ok((0..self.points).map(|i| i as f64 * h).collect())
    }
}

/// Finite-volume cell areas of a uniform vertex grid starting at 0.
fn cell_areas(r: &[f64]) -> Vec<f64> {
    let n = r.len();
    let h = r[1] - r[0];
    let big_r = r[n - 1];
    (0..n)
        .map(|i| match i {
            0 => PI * h * h / 4.0,
            _ if i == n - 1 => PI * (big_r * big_r - (big_r - h / 2.0).powi(2)),
            _ => 2.0 * PI * r[i] * h,
        })
        .collect()
}

/// Face coefficients `2π r_{i+½} / (ρ(r_{i+½}) h)` of the operator `−∇·(ρ^{-1}∇·)`.
fn face_conductances(p: &TfProfile, r: &[f64]) -> Vec<f64> {
    let h = r[1] - r[0];
    r.windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            2.0 * PI * mid / (p.eval(mid) * h)
        })
        .collect()
}

/// Limiting vortex density on a radial grid.
///
/// `mu_star` is `[½∂²_r log ρ + 2Ω₀]_+` restricted to `{H ≤ 0}`, with the
/// derivative in closed form. `mu_div` is the divergence form
/// `[∇·(ρ^{-1}∇H)]_+ 𝟙{H ≤ 0}`, discretized with the same finite-volume
/// operator used by [`vortex_potential`], so that it is the exact discrete
/// solution of `h_μ = −H` on the support.
#[derive(Debug, Clone)]
pub struct VorticityMeasure {
    pub r: Vec<f64>,
    pub mu_star: Vec<f64>,
    pub mu_div: Vec<f64>,
    pub h_tf: Vec<f64>,
    pub support: Vec<bool>,
}

impl VorticityMeasure {
    /// Largest grid radius where `mu_star > 0`, if any.
    pub fn support_radius(&self) -> Option<f64> {
        self.r.iter().zip(&self.mu_star).filter(|(_, &m)| m > 0.0).map(|(&r, _)| r).last()
    }

    /// `sup |μ*/(2Ω₀) − 1|` over the grid points with `r ≤ frac · support_radius`.
    pub fn flatness(&self, omega0: f64, frac: f64) -> Option<f64> {
        let edge = self.support_radius()?;
        self.r
            .iter()
            .zip(&self.mu_star)
            .filter(|(&r, _)| r <= frac * edge)
            .map(|(_, &m)| (m / (2.0 * omega0) - 1.0).abs())
            .reduce(f64::max)
    }
}

pub fn vortex_density(p: &TfProfile, omega0: f64, grid: VortexGrid) -> Result<VorticityMeasure> {
    let cost = cost_function(p, omega0)?;
    let r = grid.nodes(p)?;
    let n = r.len();
    let h_tf: Vec<f64> = r.iter().map(|&x| 0.5 * p.eval(x) + cost.f_tf_exact(x)).collect();
    let support: Vec<bool> = h_tf.iter().map(|&v| v <= 0.0).collect();

    let mu_star = r
        .iter()
        .zip(&support)
        .map(|(&x, &inside)| if inside { (0.5 * p.d2log(x) + 2.0 * omega0).max(0.0) } else { 0.0 })
        .collect();

    let areas = cell_areas(&r);
    let g = face_conductances(p, &r);
    let mut mu_div = vec![0.0; n];
    for i in 0..n - 1 {
        let flux_out = if i + 1 < n { g[i] * (h_tf[i + 1] - h_tf[i]) } else { 0.0 };
        let flux_in = if i > 0 { g[i - 1] * (h_tf[i] - h_tf[i - 1]) } else { 0.0 };
        let val = (flux_out - flux_in) / areas[i];
        mu_div[i] = if support[i] { val.max(0.0) } else { 0.0 };
    }

    Ok(VorticityMeasure { r, mu_star, mu_div, h_tf, support })
}

/// Solution of `−∇·(ρ^{-1}∇h) = ν` on `(0, R_cut)` with `h(R_cut) = 0`.
#[derive(Debug, Clone)]
pub struct VortexPotential {
    pub r: Vec<f64>,
    pub h: Vec<f64>,
    /// Max-norm residual of the discrete equation, relative to `max |ν|`.
    pub residual: f64,
}

/// `ν` is given by its values on the vertex grid `r` (uniform, starting at 0).
pub fn vortex_potential(nu: &[f64], r: &[f64], p: &TfProfile) -> Result<VortexPotential> {
    check_radial_grid(nu, r, p)?;
    let n = r.len();
    let areas = cell_areas(r);
    let g = face_conductances(p, r);

    // Unknowns h_0 .. h_{n-2}; h_{n-1} = 0.
    let m = n - 1;
    let mut lower = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        let left = if i > 0 { g[i - 1] } else { 0.0 };
        diag[i] = left + g[i];
        if i > 0 {
            lower[i] = -left;
        }
        if i + 1 < m {
            upper[i] = -g[i];
        }
        rhs[i] = areas[i] * nu[i];
    }
    let mut h = solve_tridiagonal(&lower, &diag, &upper, &rhs)
        .ok_or_else(|| Error::convergence("singular vortex-potential system"))?;
    h.push(0.0);

    let mut residual: f64 = 0.0;
    let scale = nu.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1e-300);
    for i in 0..m {
        let flux_out = g[i] * (h[i + 1] - h[i]);
        let flux_in = if i > 0 { g[i - 1] * (h[i] - h[i - 1]) } else { 0.0 };
        let res = -(flux_out - flux_in) / areas[i] - nu[i];
        residual = residual.max(res.abs() / scale);
    }
    Ok(VortexPotential { r: r.to_vec(), h, residual })
}

/// Renormalized vorticity energy
/// `I[ν] = ∫ ρ^{-1}|∇h_ν|²/2 + ½ρ|ν| + F ν`.
pub fn vortex_energy(nu: &[f64], r: &[f64], p: &TfProfile, omega0: f64) -> Result<f64> {
    let cost = cost_function(p, omega0)?;
    let pot = vortex_potential(nu, r, p)?;
    let areas = cell_areas(r);
    let g = face_conductances(p, r);
    let dirichlet: f64 = g.iter().zip(pot.h.windows(2)).map(|(c, w)| 0.5 * c * (w[1] - w[0]).powi(2)).sum();
    let local: f64 = r
        .iter()
        .zip(nu)
        .zip(&areas)
        .map(|((&x, &v), &a)| a * (0.5 * p.eval(x) * v.abs() + cost.f_tf_exact(x) * v))
        .sum();
    let total = dirichlet + local;
    if !total.is_finite() {
        return Err(Error::domain("measure outside energy class"));
    }
    Ok(total)
}

/// `½ ∫ H^TF ν` with the same cell weights as [`vortex_energy`].
pub fn half_cost_integral(nu: &[f64], r: &[f64], p: &TfProfile, omega0: f64) -> Result<f64> {
    check_radial_grid(nu, r, p)?;
    let cost = cost_function(p, omega0)?;
    let areas = cell_areas(r);
    Ok(0.5 * r.iter().zip(nu).zip(&areas).map(|((&x, &v), &a)| a * cost.h_tf(x) * v).sum::<f64>())
}

fn check_radial_grid(nu: &[f64], r: &[f64], p: &TfProfile) -> Result<()> {
    if r.len() < 3 || nu.len() != r.len() {
        return Err(Error::invalid("measure and grid must have equal length ≥ 3"));
    }
    if r[0] != 0.0 {
        return Err(Error::invalid("radial grid must start at r = 0"));
    }
    let r_cut = r[r.len() - 1];
    if r_cut >= p.r_tf {
        return Err(Error::domain(format!(
            "R_cut = {r_cut} reaches the Thomas-Fermi radius {}; 1/ρ is singular there",
            p.r_tf
        )));
    }
    if nu.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("measure outside energy class"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn harmonic_trap_constants() {
        let p = tf_profile(2.0).unwrap();
        assert_relative_eq!(p.lambda_tf, 1.1283791670955126, epsilon = 1e-12);
        assert_relative_eq!(p.r_tf, 1.0622519320271968, epsilon = 1e-12);
        assert_relative_eq!(first_critical_speed(2.0).unwrap(), PI.sqrt(), epsilon = 1e-12);
        assert!(tf_profile(1.5).is_err());
    }

    #[test]
    fn normalization_over_s_sweep() {
        for s in [2.0, 3.0, 4.0, 10.0, 100.0] {
            let p = tf_profile(s).unwrap();
            let mass = 2.0 * PI * integrate(|r| r * p.eval(r), 0.0, p.r_tf, 1e-14, 1e-13).unwrap();
            assert!((mass - 1.0).abs() < 1e-10, "s={s} mass={mass}");
            assert_eq!(p.eval(p.r_tf), 0.0);
        }
    }

    #[test]
    fn bisection_oracle_agrees() {
        for s in [2.0, 4.0] {
            let a = critical_speed_by_bisection(s, 1e-12).unwrap();
            assert!((a - first_critical_speed(s).unwrap()).abs() < 1e-9, "s={s}");
        }
    }

    #[test]
    fn large_s_critical_speed() {
        assert!((first_critical_speed(1e6).unwrap() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn cost_function_values() {
        let p = tf_profile(2.0).unwrap();
        let c = cost_function(&p, 5.0).unwrap();
        assert_relative_eq!(c.f_tf(0.0), -5.0 / (2.0 * PI), epsilon = 1e-12);
        assert_eq!(c.h_tf(p.r_tf), 0.0);
        for r in [0.0, 0.3, 0.9] {
            assert_relative_eq!(c.f_tf(r), c.f_tf_exact(r), epsilon = 1e-12);
        }
        let omega1 = first_critical_speed(2.0).unwrap();
        let at = cost_function(&p, omega1).unwrap();
        assert!(at.h_tf(0.0).abs() < 1e-8);
        assert!(cost_function(&p, 2.0 * omega1).unwrap().h_tf(0.0) < 0.0);
        assert!(cost_function(&p, omega1 - 1e-3).unwrap().h_tf(0.0) > 0.0);
        assert!(cost_function(&p, omega1 + 1e-3).unwrap().h_tf(0.0) < 0.0);
    }

    #[test]
    fn closed_form_log_derivatives_match_finite_differences() {
        let p = tf_profile(3.0).unwrap();
        let logr = |r: f64| p.eval(r).ln();
        let h = 1e-4;
        for r in [0.2, 0.5, 0.8] {
            let fd2 = (logr(r + h) - 2.0 * logr(r) + logr(r - h)) / (h * h);
            assert!((fd2 - p.d2log(r)).abs() < 1e-6 * (1.0 + fd2.abs()), "r={r}");
            let fd1 = (logr(r + h) - logr(r - h)) / (2.0 * h);
            assert!((fd1 - p.dlog(r)).abs() < 1e-6);
        }
    }

    #[test]
    fn subcritical_density_vanishes() {
        let p = tf_profile(2.0).unwrap();
        let omega1 = first_critical_speed(2.0).unwrap();
        let m = vortex_density(&p, 0.99 * omega1, VortexGrid::default()).unwrap();
        assert!(m.mu_star.iter().all(|&v| v == 0.0));
        assert!(m.mu_div.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn fast_rotation_is_nearly_uniform() {
        let p = tf_profile(2.0).unwrap();
        let m = vortex_density(&p, 100.0, VortexGrid::default()).unwrap();
        assert!(m.flatness(100.0, 0.8).unwrap() <= 0.05);
    }

    #[test]
    fn support_grows_with_rotation() {
        let p = tf_profile(2.0).unwrap();
        let mut last = 0.0;
        for omega in [3.0, 5.0, 10.0, 30.0] {
            let m = vortex_density(&p, omega, VortexGrid::default()).unwrap();
            let edge = m.support_radius().unwrap();
            assert!(edge >= last);
            last = edge;
        }
    }

    #[test]
    fn potential_is_linear_and_refuses_the_edge() {
        let p = tf_profile(2.0).unwrap();
        let r = VortexGrid::default().nodes(&p).unwrap();
        let zero = vortex_potential(&vec![0.0; r.len()], &r, &p).unwrap();
        assert!(zero.h.iter().all(|&v| v == 0.0));
        let nu: Vec<f64> = r.iter().map(|x| (1.0 - x).max(0.0)).collect();
        let h1 = vortex_potential(&nu, &r, &p).unwrap();
        let nu3: Vec<f64> = nu.iter().map(|v| 3.0 * v).collect();
        let h3 = vortex_potential(&nu3, &r, &p).unwrap();
        for (a, b) in h1.h.iter().zip(&h3.h) {
            assert!((3.0 * a - b).abs() < 1e-12 * (1.0 + b.abs()));
        }
        let bad: Vec<f64> = (0..11).map(|i| i as f64 * p.r_tf / 10.0).collect();
        assert!(vortex_potential(&vec![1.0; 11], &bad, &p).is_err());
    }

    #[test]
    fn energy_identity_and_minimality() {
        let p = tf_profile(2.0).unwrap();
        for omega0 in [100.0, 10.0] {
            let m = vortex_density(&p, omega0, VortexGrid::default()).unwrap();
            let pot = vortex_potential(&m.mu_div, &m.r, &p).unwrap();
            assert!(pot.residual < 1e-8);
            let e = vortex_energy(&m.mu_div, &m.r, &p, omega0).unwrap();
            assert!(e < 0.0);
            if omega0 == 100.0 {
                let half = half_cost_integral(&m.mu_div, &m.r, &p, omega0).unwrap();
                assert!(((e - half) / half).abs() < 0.01, "I = {e}, ½∫Hμ = {half}");
            }
            for t in [0.9, 1.1] {
                let scaled: Vec<f64> = m.mu_div.iter().map(|v| t * v).collect();
                assert!(vortex_energy(&scaled, &m.r, &p, omega0).unwrap() >= e);
            }
            // Outward shift costs energy. Inward shift may gain up to ~1e-4 relative:
            // the explicit density is stationary only up to the cut at R_cut
            // and the truncation at the edge of its support.
            let mut outward = m.mu_div.clone();
            outward.rotate_right(1);
            outward[0] = outward[1];
            assert!(vortex_energy(&outward, &m.r, &p, omega0).unwrap() >= e);
            let mut inward = m.mu_div.clone();
            inward.rotate_left(1);
            *inward.last_mut().unwrap() = 0.0;
            let ei = vortex_energy(&inward, &m.r, &p, omega0).unwrap();
            assert!(ei >= e - 1e-3 * e.abs(), "{ei} vs {e}");
            assert_eq!(vortex_energy(&vec![0.0; m.r.len()], &m.r, &p, omega0).unwrap(), 0.0);
        }
    }
}
