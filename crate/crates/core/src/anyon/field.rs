//! Grids, the smeared Coulomb kernel and the self-consistent gauge field.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::{Error, Result};

/// `w_R = log|·| ∗ 𝟙_{B_R}/(πR²)`: `log r` outside the disc,
/// `log R + (r² − R²)/(2R²)` inside.
pub fn smeared_log(radius: f64, r: f64) -> f64 {
    if r >= radius || radius == 0.0 {
        if r == 0.0 {
            f64::NEG_INFINITY
        } else {
            r.ln()
        }
    } else {
        radius.ln() + (r * r - radius * radius) / (2.0 * radius * radius)
    }
}

/// `∇^⊥ w_R(x) = x^⊥ / max(|x|, R)²` with `x^⊥ = (−y, x)`; zero at the origin.
pub fn smeared_perp_gradient(radius: f64, x: f64, y: f64) -> (f64, f64) {
    let r2 = (x * x + y * y).max(radius * radius);
    if r2 == 0.0 {
        return (0.0, 0.0);
    }
    (-y / r2, x / r2)
}

/// `n × n` nodes `−L + i h`, `h = 2L/n`, periodic for spectral derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub n: usize,
    pub l: f64,
}

impl Grid {
    pub fn new(n: usize, l: f64) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::domain(format!("grid size must be even and ≥ 8, got {n}")));
        }
        if !(l > 0.0) {
            return Err(Error::domain("box half-width must be positive"));
        }
        Ok(Self { n, l })
    }

    pub fn h(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.l + i as f64 * self.h()
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `(x, y)` of the flat index `k = i n + j` (`i` along x).
    pub fn point(&self, k: usize) -> (f64, f64) {
        (self.coord(k / self.n), self.coord(k % self.n))
    }

    pub fn on_boundary(&self, k: usize) -> bool {
        let (i, j) = (k / self.n, k % self.n);
        i == 0 || j == 0 || i == self.n - 1 || j == self.n - 1
    }

    /// Angular wave numbers of the periodic grid; the Nyquist mode is zeroed.
    pub(crate) fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n;
        let dk = PI / self.l;
        (0..n)
            .map(|i| if i < n / 2 { i as f64 * dk } else if i == n / 2 { 0.0 } else { (i as f64 - n as f64) * dk })
            .collect()
    }
}

/// Complex field on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField2D {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl GridField2D {
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|k| {
            let (x, y) = grid.point(k);
            f(x, y)
        });
        Self { grid, values: values.collect() }
    }

    pub fn h(&self) -> f64 {
        self.grid.h()
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.h() * self.h()
    }

    pub fn normalize(&mut self) {
        let s = 1.0 / self.mass().sqrt();
        for z in &mut self.values {
            *z *= s;
        }
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Trigonometric interpolant of `u` at arbitrary points.
    pub fn interpolate(&self, points: &[(f64, f64)]) -> Vec<Complex64> {
        let g = self.grid;
        let n = g.n;
        let mut hat = self.values.clone();
        Fft2::new(n).forward(&mut hat);
        let k = g.wavenumbers();
        let inv = 1.0 / (n * n) as f64;
        points
            .iter()
            .map(|&(x, y)| {
                let ex: Vec<Complex64> = k.iter().map(|&q| Complex64::from_polar(1.0, q * (x + g.l))).collect();
                let ey: Vec<Complex64> = k.iter().map(|&q| Complex64::from_polar(1.0, q * (y + g.l))).collect();
                let mut s = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    let row: Complex64 = (0..n).map(|j| hat[i * n + j] * ey[j]).sum();
                    s += ex[i] * row;
                }
                s * inv
            })
            .collect()
    }

    /// Largest relative standard deviation of `|u|²` over circles of the
    /// given radii (128 angles each); zero for a radial density.
    pub fn angular_spread(&self, radii: &[f64]) -> f64 {
        radii
            .iter()
            .map(|&r| {
                let pts: Vec<(f64, f64)> = (0..128)
                    .map(|k| {
                        let t = 2.0 * PI * k as f64 / 128.0;
                        (r * t.cos(), r * t.sin())
                    })
                    .collect();
                let vals: Vec<f64> = self.interpolate(&pts).iter().map(|z| z.norm_sqr()).collect();
                let mean = vals.iter().sum::<f64>() / vals.len() as f64;
                let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64;
                var.sqrt() / mean
            })
            .fold(0.0, f64::max)
    }

    /// `max |u|` on the boundary over `max |u|`.
    pub fn boundary_ratio(&self) -> f64 {
        let max = self.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let edge = (0..self.grid.len())
            .filter(|&k| self.grid.on_boundary(k))
            .map(|k| self.values[k].norm())
            .fold(0.0, f64::max);
        edge / max
    }
}

/// The two components of `A[ρ]` at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeField2D {
    pub grid: Grid,
    pub ax: Vec<f64>,
    pub ay: Vec<f64>,
}

impl GaugeField2D {
    /// `∂_x A_y − ∂_y A_x` by fourth-order differences; `NaN` within two
    /// nodes of the boundary.
    pub fn curl(&self) -> Vec<f64> {
        let n = self.grid.n;
        let h = self.grid.h();
        let d = |f: &[f64], k: usize, step: usize| {
            (8.0 * (f[k + step] - f[k - step]) - (f[k + 2 * step] - f[k - 2 * step])) / (12.0 * h)
        };
        (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                if i < 2 || j < 2 || i + 2 >= n || j + 2 >= n {
                    f64::NAN
                } else {
                    d(&self.ay, k, n) - d(&self.ax, k, 1)
                }
            })
            .collect()
    }

    /// Discrete divergence by fourth-order differences (interior only).
    pub fn divergence(&self) -> Vec<f64> {
        let n = self.grid.n;
        let h = self.grid.h();
        let d = |f: &[f64], k: usize, step: usize| {
            (8.0 * (f[k + step] - f[k - step]) - (f[k + 2 * step] - f[k - 2 * step])) / (12.0 * h)
        };
        (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                if i < 2 || j < 2 || i + 2 >= n || j + 2 >= n {
                    f64::NAN
                } else {
                    d(&self.ax, k, n) + d(&self.ay, k, 1)
                }
            })
            .collect()
    }
}

/// 2D FFTs on a square array, row-major.
#[derive(Clone)]
pub(crate) struct Fft2 {
    size: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub(crate) fn new(size: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { size, fwd: planner.plan_fft_forward(size), inv: planner.plan_fft_inverse(size) }
    }

    fn run(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.size;
        plan.process(data);
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            for i in 0..n {
                col[i] = data[i * n + j];
            }
            plan.process(&mut col);
            for i in 0..n {
                data[i * n + j] = col[i];
            }
        }
    }

    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.fwd);
    }

    /// Inverse transform including the `1/n²` factor.
    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inv);
        let s = 1.0 / (self.size * self.size) as f64;
        for z in data.iter_mut() {
            *z *= s;
        }
    }
}

/// Free-space convolution with `∇^⊥ w_R` on a zero-padded `2n × 2n` grid.
/// The sums `h² Σ_j K(x_i − x_j) f_j` are exact discrete convolutions.
#[derive(Clone)]
pub struct GaugeSolver {
    pub grid: Grid,
    pub radius: f64,
    fft: Fft2,
    /// Transformed kernels; `K_x + i K_y` packed into one complex array
    /// would mix the components, so both are kept.
    kx: Vec<Complex64>,
    ky: Vec<Complex64>,
}

impl GaugeSolver {
    pub fn new(grid: Grid, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) {
            return Err(Error::domain("anyon radius must be ≥ 0"));
        }
        let n = grid.n;
        let p = 2 * n;
        let h = grid.h();
        let mut kx = vec![Complex64::new(0.0, 0.0); p * p];
        let mut ky = kx.clone();
        for a in 0..p {
            for b in 0..p {
                let off = |i: usize| if i < n { Some(i as f64) } else if i > n { Some(i as f64 - p as f64) } else { None };
                if let (Some(da), Some(db)) = (off(a), off(b)) {
                    let (gx, gy) = smeared_perp_gradient(radius, da * h, db * h);
                    kx[a * p + b] = Complex64::new(gx * h * h, 0.0);
                    ky[a * p + b] = Complex64::new(gy * h * h, 0.0);
                }
            }
        }
        let fft = Fft2::new(p);
        fft.forward(&mut kx);
        fft.forward(&mut ky);
        Ok(Self { grid, radius, fft, kx, ky })
    }

    fn pad(&self, f: &[f64]) -> Vec<Complex64> {
        let n = self.grid.n;
        let p = 2 * n;
        let mut out = vec![Complex64::new(0.0, 0.0); p * p];
        for i in 0..n {
            for j in 0..n {
                out[i * p + j] = Complex64::new(f[i * n + j], 0.0);
            }
        }
        out
    }

    fn crop(&self, g: &[Complex64]) -> Vec<f64> {
        let n = self.grid.n;
        let p = 2 * n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = g[i * p + j].re;
            }
        }
        out
    }

    /// `(K_x ∗ f, K_y ∗ f)`.
    pub(crate) fn convolve(&self, f: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut fh = self.pad(f);
        self.fft.forward(&mut fh);
        let mut gx: Vec<Complex64> = fh.iter().zip(&self.kx).map(|(a, b)| a * b).collect();
        let mut gy: Vec<Complex64> = fh.iter().zip(&self.ky).map(|(a, b)| a * b).collect();
        self.fft.inverse(&mut gx);
        self.fft.inverse(&mut gy);
        (self.crop(&gx), self.crop(&gy))
    }

    /// `K_x ∗ g_x + K_y ∗ g_y`.
    pub(crate) fn convolve_dot(&self, gx: &[f64], gy: &[f64]) -> Vec<f64> {
        let mut a = self.pad(gx);
        let mut b = self.pad(gy);
        self.fft.forward(&mut a);
        self.fft.forward(&mut b);
        let mut s: Vec<Complex64> = (0..a.len()).map(|k| a[k] * self.kx[k] + b[k] * self.ky[k]).collect();
        self.fft.inverse(&mut s);
        self.crop(&s)
    }

    /// `A[ρ] = ∇^⊥ w_R ∗ ρ`. Errors if `ρ` is not negligible on the boundary.
    pub fn gauge_field(&self, rho: &[f64]) -> Result<GaugeField2D> {
        if rho.len() != self.grid.len() {
            return Err(Error::invalid("density does not match the grid"));
        }
        if rho.iter().any(|&r| r < 0.0 || !r.is_finite()) {
            return Err(Error::domain("density must be finite and non-negative"));
        }
        let max = rho.iter().cloned().fold(0.0, f64::max);
        let edge = (0..rho.len()).filter(|&k| self.grid.on_boundary(k)).map(|k| rho[k]).fold(0.0, f64::max);
        if edge > 1e-10 * max {
            return Err(Error::domain(format!("density reaches the box boundary ({:.2e} of its maximum)", edge / max)));
        }
        let (ax, ay) = self.convolve(rho);
        Ok(GaugeField2D { grid: self.grid, ax, ay })
    }
}

/// One-shot `A[ρ]` on `grid`.
pub fn gauge_field(rho: &[f64], grid: Grid, radius: f64) -> Result<GaugeField2D> {
    GaugeSolver::new(grid, radius)?.gauge_field(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::gauss_legendre;
    use crate::numerics::special::bessel_i0_scaled;

    #[test]
    fn smeared_log_shape() {
        let r0 = 0.4;
        assert_eq!(smeared_log(r0, 1.3), 1.3f64.ln());
        assert!((smeared_log(r0, r0 * (1.0 - 1e-12)) - r0.ln()).abs() < 1e-11);
        assert_eq!(smeared_log(0.0, 0.0), f64::NEG_INFINITY);
        // Δ w_R = 2/R² inside, 0 outside (discrete radial Laplacian)
        for r in [0.1, 0.25, 0.35, 0.6, 1.5] {
            let h = 1e-4;
            let f = |s: f64| smeared_log(r0, s);
            let lap = (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h) + (f(r + h) - f(r - h)) / (2.0 * h * r);
            let expect = if r < r0 { 2.0 / (r0 * r0) } else { 0.0 };
            assert!((lap - expect).abs() < 1e-4 * (1.0 + expect), "r={r}: {lap}");
        }
    }

    fn gaussian(grid: Grid) -> Vec<f64> {
        (0..grid.len())
            .map(|k| {
                let (x, y) = grid.point(k);
                (-(x * x + y * y)).exp() / PI
            })
            .collect()
    }

    #[test]
    fn zero_density_and_boundary_check() {
        let grid = Grid::new(32, 5.0).unwrap();
        let a = gauge_field(&vec![0.0; grid.len()], grid, 0.3).unwrap();
        assert!(a.ax.iter().chain(&a.ay).all(|&v| v == 0.0));
        let flat = vec![1.0; grid.len()];
        assert!(gauge_field(&flat, grid, 0.3).is_err());
    }

    #[test]
    fn gauss_law_for_radial_density() {
        let grid = Grid::new(128, 6.0).unwrap();
        let a = gauge_field(&gaussian(grid), grid, 0.0).unwrap();
        for k in 0..grid.len() {
            let (x, y) = grid.point(k);
            let r = (x * x + y * y).sqrt();
            if !(0.5..=2.0).contains(&r) {
                continue;
            }
            // azimuthal, with |A| = M(r)/r, M(r) = 1 − e^{−r²}
            let expect = (1.0 - (-r * r).exp()) / r;
            let (ex, ey) = (-y / r * expect, x / r * expect);
            assert!(((a.ax[k] - ex).powi(2) + (a.ay[k] - ey).powi(2)).sqrt() < 0.01 * expect);
        }
    }

    /// `(ρ ∗ χ_R)(x)` for `ρ = e^{−|x|²}/π`, from the angular average of `ρ`
    /// on circles around `x`.
    fn smeared_gaussian(radius: f64, r: f64) -> f64 {
        let (s, w) = gauss_legendre(60, 0.0, radius);
        let mut acc = 0.0;
        for (si, wi) in s.iter().zip(&w) {
            // (1/2π)∫ e^{−|x + s e^{iθ}|²} dθ = e^{−r²−s²} I0(2rs)
            let z = 2.0 * r * si;
            acc += wi * 2.0 * PI * si * (-(r - si).powi(2)).exp() * bessel_i0_scaled(z) / PI;
        }
        acc / (PI * radius * radius)
    }

    #[test]
    fn curl_is_smeared_density() {
        let radius = 0.5;
        let grid = Grid::new(128, 6.0).unwrap();
        let a = gauge_field(&gaussian(grid), grid, radius).unwrap();
        let curl = a.curl();
        let div = a.divergence();
        let (mut num, mut den, mut dmax) = (0.0, 0.0, 0.0f64);
        for k in 0..grid.len() {
            if curl[k].is_nan() {
                continue;
            }
            let (x, y) = grid.point(k);
            let expect = 2.0 * PI * smeared_gaussian(radius, (x * x + y * y).sqrt());
            num += (curl[k] - expect).powi(2);
            den += expect * expect;
            dmax = dmax.max(div[k].abs());
        }
        let rel = (num / den).sqrt();
        assert!(rel < 1e-3, "relative L2 error {rel}");
        assert!(dmax < 1e-3, "divergence {dmax}");
    }
}
