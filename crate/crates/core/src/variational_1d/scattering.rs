//! Zero-energy scattering length of a radial potential `w ≥ 0` supported in
//! `B(0, R₀)`.
//!
//! With `u = r f`, the equation `(−2Δ + w) f = 0` becomes `u'' = (w/2) u`,
//! `u(0) = 0`, and outside the range `u ∝ r − a`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::numerics::quadrature::gauss_legendre;
use crate::{Error, Result};

#[derive(Clone)]
pub enum ScatteringPotential {
    /// `w = +∞` on `B(0, R₀)`.
    HardSphere,
    /// Piecewise constant on `values.len()` equal shells of `[0, R₀]`.
    /// A single value is the soft ball.
    Steps(Vec<f64>),
    /// A general radial profile on `[0, R₀]`, integrated by RK4.
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for ScatteringPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScatteringPotential::HardSphere => write!(f, "HardSphere"),
            ScatteringPotential::Steps(v) => f.debug_tuple("Steps").field(v).finish(),
            ScatteringPotential::Function(_) => write!(f, "Function(..)"),
        }
    }
}

impl ScatteringPotential {
    pub fn soft_ball(v0: f64) -> Self {
        ScatteringPotential::Steps(vec![v0])
    }

    /// `∫_{ℝ³} w`; infinite for the hard sphere.
    pub fn integral(&self, r0: f64) -> f64 {
        match self {
            ScatteringPotential::HardSphere => f64::INFINITY,
            ScatteringPotential::Steps(v) => {
                let h = r0 / v.len() as f64;
                v.iter()
                    .enumerate()
                    .map(|(j, &x)| 4.0 * PI * x * (((j + 1) as f64 * h).powi(3) - (j as f64 * h).powi(3)) / 3.0)
                    .sum()
            }
            ScatteringPotential::Function(w) => {
                let (x, wt) = gauss_legendre(64, 0.0, r0);
                4.0 * PI * x.iter().zip(&wt).map(|(&r, &q)| q * r * r * w(r)).sum::<f64>()
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ScatteringResult {
    pub a: f64,
    /// `∫ 2|∇f|² + w f²` for the solution normalized by `f → 1`; equals `8πa`.
    pub energy: f64,
}

const RK4_STEPS: usize = 20_000;

/// Scattering length and the variational energy of the zero-energy solution.
pub fn scattering_length(w: &ScatteringPotential, r0: f64) -> Result<ScatteringResult> {
    if !(r0 > 0.0) || !r0.is_finite() {
        return Err(Error::domain(format!("range R0 = {r0} must be positive")));
    }
    match w {
        ScatteringPotential::HardSphere => Ok(ScatteringResult { a: r0, energy: 8.0 * PI * r0 }),
        ScatteringPotential::Steps(values) => {
            if values.is_empty() {
                return Err(Error::invalid("empty step potential"));
            }
            if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                return Err(Error::domain("scattering potential must be finite and non-negative"));
            }
            Ok(steps(values, r0))
        }
        ScatteringPotential::Function(f) => {
            let h = r0 / RK4_STEPS as f64;
            if (0..=RK4_STEPS).any(|i| !(f(i as f64 * h) >= 0.0)) {
                return Err(Error::domain("scattering potential must be non-negative on [0, R0]"));
            }
            Ok(rk4(f.as_ref(), r0))
        }
    }
}

/// Exact propagation through constant shells.
fn steps(values: &[f64], r0: f64) -> ScatteringResult {
    let h = r0 / values.len() as f64;
    // State (u, u') at each shell boundary; rescaled to avoid overflow.
    let mut starts = Vec::with_capacity(values.len());
    let (mut u, mut du) = (0.0f64, 1.0f64);
    let mut log_scale = 0.0;
    for &v in values {
        starts.push((u, du, log_scale));
        let k = (v / 2.0).sqrt();
        let (nu, ndu) = propagate(u, du, k, h);
        let s = nu.abs().max(ndu.abs());
        u = nu / s;
        du = ndu / s;
        log_scale += s.ln();
    }
    let a = r0 - u / du;

    // Rescale each shell so that u = r − a outside the range.
    let (x, wt) = gauss_legendre(24, 0.0, 1.0);
    let mut inner = 0.0;
    for (j, &v) in values.iter().enumerate() {
        let (u0, du0, ls) = starts[j];
        let c = (ls - log_scale).exp() / du;
        let k = (v / 2.0).sqrt();
        let left = j as f64 * h;
        for (&xi, &wi) in x.iter().zip(&wt) {
            let s = xi * h;
            let r = left + s;
            let (ur, dur) = propagate(u0, du0, k, s);
            let (ur, dur) = (c * ur, c * dur);
            // f = u/r, f' = (u' r − u)/r²
            let f = ur / r;
            let df = (dur * r - ur) / (r * r);
            inner += wi * h * 4.0 * PI * r * r * (2.0 * df * df + v * f * f);
        }
    }
    ScatteringResult { a, energy: inner + 8.0 * PI * a * a / r0 }
}

fn propagate(u: f64, du: f64, k: f64, s: f64) -> (f64, f64) {
    if k == 0.0 {
        return (u + du * s, du);
    }
    let (sh, ch) = ((k * s).sinh(), (k * s).cosh());
    (u * ch + du * sh / k, u * k * sh + du * ch)
}

fn rk4(w: &(dyn Fn(f64) -> f64 + Send + Sync), r0: f64) -> ScatteringResult {
    let n = RK4_STEPS;
    let h = r0 / n as f64;
    let mut u = vec![0.0; n + 1];
    let mut du = vec![0.0; n + 1];
    du[0] = 1.0;
    for i in 0..n {
        let r = i as f64 * h;
        let rhs = |rr: f64, y: f64| 0.5 * w(rr) * y;
        let (y, p) = (u[i], du[i]);
        let k1 = (p, rhs(r, y));
        let k2 = (p + 0.5 * h * k1.1, rhs(r + 0.5 * h, y + 0.5 * h * k1.0));
        let k3 = (p + 0.5 * h * k2.1, rhs(r + 0.5 * h, y + 0.5 * h * k2.0));
        let k4 = (p + h * k3.1, rhs(r + h, y + h * k3.0));
        u[i + 1] = y + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        du[i + 1] = p + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    }
    let a = r0 - u[n] / du[n];
    let c = 1.0 / du[n];
    // Simpson on 4πr²(2f'² + w f²); the integrand is smooth at r = 0.
    let integrand = |i: usize| -> f64 {
        let r = i as f64 * h;
        if i == 0 {
            // f → c u'(0), f' → 0, so the integrand vanishes like r².
            return 0.0;
        }
        let f = c * u[i] / r;
        let df = c * (du[i] * r - u[i]) / (r * r);
        4.0 * PI * r * r * (2.0 * df * df + w(r) * f * f)
    };
    let mut s = integrand(0) + integrand(n);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * integrand(i);
    }
    ScatteringResult { a, energy: s * h / 3.0 + 8.0 * PI * a * a / r0 }
}

/// Closed form for the soft ball `w = V₀ 𝟙_{B(0, R₀)}`: `R₀ − tanh(κR₀)/κ`, `κ = √(V₀/2)`.
pub fn soft_ball_length(v0: f64, r0: f64) -> f64 {
    if v0 == 0.0 {
        return 0.0;
    }
    let k = (v0 / 2.0).sqrt();
    r0 - (k * r0).tanh() / k
}
