//! Renormalized jellium energy of periodic configurations.
//!
//! A cell of the lattice `Λ` carries points `p` with multiplicities `N_p`,
//! neutralized by a uniform background of density `m`. Each point is smeared
//! into `δ^{(η)} = η^{-d} ρ(·/η)` and `E_η = ∇h_η` with
//! `−Δh_η = c_d(Σ N_p δ_p^{(η)} − m)` (`c_2 = 2π`, `c_3 = 4π`,
//! `w = −log|x|` or `1/|x|`). The returned quantity is
//! `W_η = ⨍|E_η|² − m(κ_d w(η) + γ_2 𝟙_{d=2})`.
//!
//! The cell energy `c_d Σ_{p,q} N_p N_q (G∗δ^{(η)}∗δ^{(η)})(p − q)` with
//! the zero-mean periodic Green function `G` splits exactly into
//!
//! * the point-charge Ewald sum (off-diagonal `G(p−q)` and the regular part
//!   `ξ = lim_{x→0} G(x) − w(x)` on the diagonal),
//! * the smeared self-energy `D(δ^{(η)}, δ^{(η)})` for each pair at the same point,
//! * a background correction `c_d² m² η² ⟨r²⟩/d` coming from the zero mode of
//!   `w∗δ^{(η)}∗δ^{(η)} − w`.
//!
//! Pairs at distinct points never overlap (`η` below half the minimal
//! distance), so by Newton's theorem they interact as point charges.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::numerics::quadrature::gauss_legendre;
use crate::numerics::special::{euler_gamma, expint_e1, j0, j1};
use crate::{Error, Result};

/// Radial profile of the unit smeared charge, supported in `B(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Profile {
    UniformBall,
    /// Density proportional to `(1 − r²)^k`.
    Bump(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmearedCharge {
    pub eta: f64,
    pub profile: Profile,
}

impl SmearedCharge {
    pub fn uniform(eta: f64) -> Self {
        Self { eta, profile: Profile::UniformBall }
    }

    fn validate(&self, d: usize) -> Result<()> {
        check_dim(d)?;
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::domain(format!("smearing radius must be positive, got {}", self.eta)));
        }
        Ok(())
    }

    fn k(&self) -> u32 {
        match self.profile {
            Profile::UniformBall => 0,
            Profile::Bump(k) => k,
        }
    }

    /// Radial mass density `μ'(u) = Σ c_j u^{e_j}` of the unit profile.
    fn radial_polynomial(&self, d: usize) -> Vec<(f64, i32)> {
        let k = self.k();
        let sphere = if d == 2 { 2.0 * PI } else { 4.0 * PI };
        let mut terms: Vec<(f64, i32)> = (0..=k)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                (sign * binomial(k, j) * sphere, (2 * j + d as u32 - 1) as i32)
            })
            .collect();
        let total: f64 = terms.iter().map(|(c, e)| c / (*e + 1) as f64).sum();
        for t in &mut terms {
            t.0 /= total;
        }
        terms
    }

    /// Profile density at radius `u` of the unit charge.
    pub fn unit_density(&self, d: usize, u: f64) -> f64 {
        if u >= 1.0 {
            return 0.0;
        }
        let sphere = if d == 2 { 2.0 * PI } else { 4.0 * PI };
        let c0 = self.radial_polynomial(d)[0].0 / sphere;
        c0 * (1.0 - u * u).powi(self.k() as i32)
    }

    /// `∫|x|² ρ(x) dx` for the unit profile.
    pub fn second_moment(&self, d: usize) -> f64 {
        self.radial_polynomial(d).iter().map(|(c, e)| c / (*e + 3) as f64).sum()
    }

    /// `D(δ^{(1)}, δ^{(1)}) = ∬ w(x − y) ρ(x) ρ(y)`, exact for polynomial
    /// profiles through `D = 2∫ w(u) M(u) μ'(u) du`.
    pub fn unit_self_energy(&self, d: usize) -> f64 {
        let poly = self.radial_polynomial(d);
        let mut s = 0.0;
        for &(ci, ei) in &poly {
            for &(cj, ej) in &poly {
                let n = (ei + ej + 1) as f64;
                // ∫ u^n w(u) du on [0, 1]
                let wint = if d == 3 { 1.0 / n } else { 1.0 / ((n + 1.0) * (n + 1.0)) };
                s += 2.0 * ci * cj / (ei + 1) as f64 * wint;
            }
        }
        s
    }

    /// `D(δ^{(η)}, δ^{(η)})`.
    pub fn self_energy(&self, d: usize) -> f64 {
        let d1 = self.unit_self_energy(d);
        if d == 2 {
            d1 - self.eta.ln()
        } else {
            d1 / self.eta
        }
    }

    /// Fourier transform `∫ e^{−iq·x} ρ(x) dx` of the unit profile at `|q| = q`.
    pub fn form_factor(&self, d: usize, q: f64) -> f64 {
        let q = q.abs();
        if self.profile == Profile::UniformBall {
            return if q < 1e-3 {
                1.0 - q * q / (2.0 * (d as f64 + 2.0))
            } else if d == 2 {
                2.0 * j1(q) / q
            } else {
                3.0 * (q.sin() - q * q.cos()) / (q * q * q)
            };
        }
        let poly = self.radial_polynomial(d);
        let panels = 8 + (q / 4.0).ceil() as usize;
        let mut s = 0.0;
        for p in 0..panels {
            let (a, b) = (p as f64 / panels as f64, (p + 1) as f64 / panels as f64);
            let (x, w) = gauss_legendre(24, a, b);
            for (u, wu) in x.iter().zip(&w) {
                let dens: f64 = poly.iter().map(|(c, e)| c * u.powi(*e)).sum();
                let kernel = if d == 2 { j0(q * u) } else { sinc(q * u) };
                s += wu * dens * kernel;
            }
        }
        s
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn check_dim(d: usize) -> Result<()> {
    if d == 2 || d == 3 {
        Ok(())
    } else {
        Err(Error::domain(format!("jellium is implemented for d = 2, 3, got {d}")))
    }
}

fn coulomb_constant(d: usize) -> f64 {
    if d == 2 {
        2.0 * PI
    } else {
        4.0 * PI
    }
}

fn w(d: usize, r: f64) -> f64 {
    if d == 2 {
        -r.ln()
    } else {
        1.0 / r
    }
}

/// The radial function `f_η` with `−Δf_η = c_d(δ^{(η)} − δ_0)`, vanishing
/// outside `B(0, η)`. It equals the potential of the smeared charge minus
/// the point potential.
#[derive(Debug, Clone, Copy)]
pub struct SmearedKernel {
    pub charge: SmearedCharge,
    pub d: usize,
}

impl SmearedKernel {
    pub fn eval(&self, r: f64) -> f64 {
        let eta = self.charge.eta;
        if r >= eta {
            return 0.0;
        }
        let t = r / eta;
        let poly = self.charge.radial_polynomial(self.d);
        let mass: f64 = poly.iter().map(|(c, e)| c * t.powi(e + 1) / (e + 1) as f64).sum();
        if self.d == 3 {
            let tail: f64 = poly.iter().map(|(c, e)| c * (1.0 - t.powi(*e)) / *e as f64).sum();
            ((mass - 1.0) / t + tail) / eta
        } else {
            let lt = t.ln();
            // ∫_t^1 u^e log u du
            let tail: f64 = poly
                .iter()
                .map(|(c, e)| {
                    let n1 = (e + 1) as f64;
                    c * (-1.0 / (n1 * n1) - t.powi(e + 1) * (lt / n1 - 1.0 / (n1 * n1)))
                })
                .sum();
            -lt * (mass - 1.0) - tail
        }
    }
}

pub fn smeared_kernel(sc: SmearedCharge, d: usize) -> Result<SmearedKernel> {
    sc.validate(d)?;
    Ok(SmearedKernel { charge: sc, d })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaConstants {
    pub kappa: f64,
    pub gamma2: f64,
}

/// `κ_3 = c_3 D(δ^{(1)}, δ^{(1)})`, `γ_3 = 0`; `κ_2 = 2π`, `γ_2 = c_2 D(δ^{(1)}, δ^{(1)})`.
pub fn kappa_constants(sc: SmearedCharge, d: usize) -> Result<KappaConstants> {
    check_dim(d)?;
    let c = coulomb_constant(d) * sc.unit_self_energy(d);
    Ok(if d == 2 { KappaConstants { kappa: 2.0 * PI, gamma2: c } } else { KappaConstants { kappa: c, gamma2: 0.0 } })
}

/// One cell of a periodic configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicChargeConfig {
    pub d: usize,
    /// Lattice vectors, one per row.
    pub basis: Vec<Vec<f64>>,
    pub points: Vec<Vec<f64>>,
    pub multiplicities: Vec<u32>,
    /// Background density.
    pub m: f64,
}

impl PeriodicChargeConfig {
    pub fn new(basis: Vec<Vec<f64>>, points: Vec<Vec<f64>>, multiplicities: Vec<u32>, m: f64) -> Result<Self> {
        let d = basis.len();
        check_dim(d)?;
        if basis.iter().chain(&points).any(|v| v.len() != d) {
            return Err(Error::invalid("basis and points must all have dimension d"));
        }
        if points.is_empty() || multiplicities.len() != points.len() || multiplicities.contains(&0) {
            return Err(Error::invalid("need at least one point and a positive multiplicity for each"));
        }
        let cfg = Self { d, basis, points, multiplicities, m };
        let vol = cfg.volume();
        if !(vol > 0.0) {
            return Err(Error::invalid("lattice basis is degenerate"));
        }
        let charge = cfg.charge() as f64;
        if !(m > 0.0) || (charge - m * vol).abs() > 1e-12 * charge.max(1.0) {
            return Err(Error::domain(format!("cell is not neutral: Σ N_p = {charge}, m·|Λ| = {}", m * vol)));
        }
        Ok(cfg)
    }

    fn scaled_cell(d: usize, basis: Vec<Vec<f64>>, points: Vec<Vec<f64>>, m: f64) -> Result<Self> {
        let n = points.len();
        let unit = Self { d, basis: basis.clone(), points: points.clone(), multiplicities: vec![1; n], m: 1.0 };
        let s = (n as f64 / (m * unit.volume())).powf(1.0 / d as f64);
        let scale = |v: Vec<Vec<f64>>| v.into_iter().map(|x| x.into_iter().map(|c| c * s).collect()).collect();
        Self::new(scale(basis), scale(points), vec![1; n], m)
    }

    pub fn square(m: f64) -> Result<Self> {
        Self::scaled_cell(2, vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![vec![0.0, 0.0]], m)
    }

    pub fn triangular(m: f64) -> Result<Self> {
        Self::scaled_cell(2, vec![vec![1.0, 0.0], vec![0.5, 0.75f64.sqrt()]], vec![vec![0.0, 0.0]], m)
    }

    pub fn cubic(m: f64) -> Result<Self> {
        let e = |i: usize| (0..3).map(|j| if i == j { 1.0 } else { 0.0 }).collect();
        Self::scaled_cell(3, vec![e(0), e(1), e(2)], vec![vec![0.0; 3]], m)
    }

    pub fn bcc(m: f64) -> Result<Self> {
        let b = vec![vec![-1.0, 1.0, 1.0], vec![1.0, -1.0, 1.0], vec![1.0, 1.0, -1.0]];
        Self::scaled_cell(3, b, vec![vec![0.0; 3]], m)
    }

    pub fn fcc(m: f64) -> Result<Self> {
        let b = vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]];
        Self::scaled_cell(3, b, vec![vec![0.0; 3]], m)
    }

    /// Lattice by name: square, triangular, cubic, bcc or fcc.
    pub fn named(name: &str, m: f64) -> Result<Self> {
        match name {
            "square" => Self::square(m),
            "triangular" => Self::triangular(m),
            "cubic" => Self::cubic(m),
            "bcc" => Self::bcc(m),
            "fcc" => Self::fcc(m),
            _ => Err(Error::invalid(format!("unknown lattice {name:?}"))),
        }
    }

    pub fn volume(&self) -> f64 {
        DMatrix::from_fn(self.d, self.d, |i, j| self.basis[i][j]).determinant().abs()
    }

    pub fn charge(&self) -> u64 {
        self.multiplicities.iter().map(|&n| n as u64).sum()
    }

    /// Dual vectors `b_j` with `a_i·b_j = 2π δ_ij`.
    pub fn dual_basis(&self) -> Vec<Vec<f64>> {
        let a = DMatrix::from_fn(self.d, self.d, |i, j| self.basis[i][j]);
        let inv = a.try_inverse().expect("non-degenerate basis");
        (0..self.d).map(|j| (0..self.d).map(|i| 2.0 * PI * inv[(i, j)]).collect()).collect()
    }

    /// The same configuration described on an `n × … × n` supercell.
    pub fn supercell(&self, n: usize) -> Self {
        let d = self.d;
        let mut points = Vec::new();
        let mut mult = Vec::new();
        for idx in 0..n.pow(d as u32) {
            let shift: Vec<f64> = (0..d)
                .map(|c| (0..d).map(|i| ((idx / n.pow(i as u32)) % n) as f64 * self.basis[i][c]).sum())
                .collect();
            for (p, &np) in self.points.iter().zip(&self.multiplicities) {
                points.push(p.iter().zip(&shift).map(|(a, b)| a + b).collect());
                mult.push(np);
            }
        }
        let basis = self.basis.iter().map(|v| v.iter().map(|c| c * n as f64).collect()).collect();
        Self { d, basis, points, multiplicities: mult, m: self.m }
    }

    /// Rotation by `angle` in the plane of the first two coordinates.
    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let rot = |v: &Vec<f64>| {
            let mut out = v.clone();
            out[0] = c * v[0] - s * v[1];
            out[1] = s * v[0] + c * v[1];
            out
        };
        Self {
            basis: self.basis.iter().map(rot).collect(),
            points: self.points.iter().map(rot).collect(),
            ..self.clone()
        }
    }

    /// The configuration dilated to background density `m`.
    pub fn with_density(&self, m: f64) -> Result<Self> {
        let s = (self.m / m).powf(1.0 / self.d as f64);
        let scale = |v: &Vec<Vec<f64>>| v.iter().map(|x| x.iter().map(|c| c * s).collect()).collect();
        Self::new(scale(&self.basis), scale(&self.points), self.multiplicities.clone(), m)
    }

    /// Lattice vectors of norm at most `radius`.
    fn lattice_vectors(&self, radius: f64) -> Vec<Vec<f64>> {
        vectors_within(&self.basis, &self.dual_basis(), radius)
    }

    /// Smallest distance between two distinct points of the periodic configuration.
    pub fn min_distance(&self) -> f64 {
        let shortest = self.basis.iter().map(|v| norm(v)).fold(f64::INFINITY, f64::min);
        let spread = self.max_offset();
        let lat = self.lattice_vectors(shortest + spread);
        let mut best = shortest;
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i..] {
                for l in &lat {
                    let r = norm_diff_shift(p, q, l);
                    if r > 1e-12 * shortest && r < best {
                        best = r;
                    }
                }
            }
        }
        best
    }

    fn max_offset(&self) -> f64 {
        let mut s: f64 = 0.0;
        for p in &self.points {
            for q in &self.points {
                s = s.max(norm_diff_shift(p, q, &vec![0.0; self.d]));
            }
        }
        s
    }

    /// `|Σ_p N_p e^{ik·p}|²`.
    fn structure_factor(&self, k: &[f64]) -> f64 {
        let (mut re, mut im) = (0.0, 0.0);
        for (p, &n) in self.points.iter().zip(&self.multiplicities) {
            let phase: f64 = p.iter().zip(k).map(|(a, b)| a * b).sum();
            re += n as f64 * phase.cos();
            im += n as f64 * phase.sin();
        }
        re * re + im * im
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// `|p − q + l|`.
fn norm_diff_shift(p: &[f64], q: &[f64], l: &[f64]) -> f64 {
    p.iter().zip(q).zip(l).map(|((a, b), c)| (a - b + c).powi(2)).sum::<f64>().sqrt()
}

/// All integer combinations of `basis` with norm at most `radius`.
fn vectors_within(basis: &[Vec<f64>], dual: &[Vec<f64>], radius: f64) -> Vec<Vec<f64>> {
    let d = basis.len();
    // |n_i| = |L·b_i|/2π ≤ radius |b_i|/2π
    let bound: Vec<i64> = dual.iter().map(|b| (radius * norm(b) / (2.0 * PI)).floor() as i64).collect();
    let mut out = Vec::new();
    let mut n = bound.iter().map(|b| -b).collect::<Vec<_>>();
    loop {
        let v: Vec<f64> = (0..d).map(|c| (0..d).map(|i| n[i] as f64 * basis[i][c]).sum()).collect();
        if norm(&v) <= radius {
            out.push(v);
        }
        let mut i = 0;
        loop {
            if i == d {
                return out;
            }
            n[i] += 1;
            if n[i] <= bound[i] {
                break;
            }
            n[i] = -bound[i];
            i += 1;
        }
    }
}

/// Ewald evaluation and its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JelliumEnergy {
    pub w_eta: f64,
    /// `⨍|E_η|²`.
    pub field_energy: f64,
    pub kappa: f64,
    pub gamma2: f64,
    pub alpha: f64,
    pub real_cutoff: f64,
    pub reciprocal_cutoff: f64,
    pub real_terms: usize,
    pub reciprocal_terms: usize,
    pub min_distance: f64,
}

fn check_admissible(cfg: &PeriodicChargeConfig, sc: &SmearedCharge) -> Result<f64> {
    sc.validate(cfg.d)?;
    let again = PeriodicChargeConfig::new(cfg.basis.clone(), cfg.points.clone(), cfg.multiplicities.clone(), cfg.m)?;
    let dmin = again.min_distance();
    if 2.0 * sc.eta >= dmin {
        return Err(Error::domain(format!("smeared charges overlap: η = {} ≥ half the minimal distance {dmin}", sc.eta)));
    }
    Ok(dmin)
}

/// Assembles `W_η` from the point-charge cell energy
/// `Σ_{p≠q} N_p N_q G(p−q) + ξ Σ N_p²`.
fn assemble(cfg: &PeriodicChargeConfig, sc: &SmearedCharge, point_energy: f64) -> (f64, f64) {
    let d = cfg.d;
    let c = coulomb_constant(d);
    let vol = cfg.volume();
    let n2: f64 = cfg.multiplicities.iter().map(|&n| (n as f64).powi(2)).sum();
    let self_e = sc.self_energy(d);
    let field = c / vol * (point_energy + n2 * self_e) + c * c * cfg.m * cfg.m * sc.eta.powi(2) * sc.second_moment(d) / d as f64;
    (field - cfg.m * c * self_e, field)
}

/// `W_η` by Ewald summation with `α = √π / |Λ|^{1/d}` and cutoffs
/// `α R = 6.5`, `K = 13 α`, so that both truncations are below `e^{−42}`.
pub fn field_energy_eta(cfg: &PeriodicChargeConfig, sc: &SmearedCharge) -> Result<JelliumEnergy> {
    let dmin = check_admissible(cfg, sc)?;
    let d = cfg.d;
    let c = coulomb_constant(d);
    let vol = cfg.volume();
    let alpha = PI.sqrt() / vol.powf(1.0 / d as f64);
    let r_cut = 6.5 / alpha;
    let k_cut = 13.0 * alpha;
    let short = |r: f64| if d == 2 { 0.5 * expint_e1(alpha * alpha * r * r) } else { libm::erfc(alpha * r) / r };

    let lat = cfg.lattice_vectors(r_cut + cfg.max_offset());
    let mut real = 0.0;
    let mut real_terms = 0;
    for (p, &np) in cfg.points.iter().zip(&cfg.multiplicities) {
        for (q, &nq) in cfg.points.iter().zip(&cfg.multiplicities) {
            let mut s = 0.0;
            for l in &lat {
                let r = norm_diff_shift(p, q, l);
                if r > 0.0 && r <= r_cut {
                    s += short(r);
                    real_terms += 1;
                }
            }
            real += np as f64 * nq as f64 * s;
        }
    }

    let mut recip = 0.0;
    let mut reciprocal_terms = 0;
    for k in vectors_within(&cfg.dual_basis(), &cfg.basis, k_cut) {
        let k2: f64 = k.iter().map(|x| x * x).sum();
        if k2 == 0.0 {
            continue;
        }
        recip += (-k2 / (4.0 * alpha * alpha)).exp() / k2 * cfg.structure_factor(&k);
        reciprocal_terms += 1;
    }
    recip *= c / vol;

    let n2: f64 = cfg.multiplicities.iter().map(|&n| (n as f64).powi(2)).sum();
    let total = cfg.charge() as f64;
    // lim_{x→0} short(x) − w(x) and the mean of the short-range kernel
    let (self_const, mean) = if d == 2 {
        (-0.5 * euler_gamma() - alpha.ln(), PI / (2.0 * alpha * alpha * vol))
    } else {
        (-2.0 * alpha / PI.sqrt(), PI / (alpha * alpha * vol))
    };
    let point_energy = real + recip + n2 * self_const - total * total * mean;
    let (w_eta, field_energy) = assemble(cfg, sc, point_energy);
    let k = kappa_constants(*sc, d)?;
    Ok(JelliumEnergy {
        w_eta,
        field_energy,
        kappa: k.kappa,
        gamma2: k.gamma2,
        alpha,
        real_cutoff: r_cut,
        reciprocal_cutoff: k_cut,
        real_terms,
        reciprocal_terms,
        min_distance: dmin,
    })
}

/// Smooth cutoff: 1 on `[0, 0.2]`, 0 beyond 1, `C^∞` in between.
fn window(t: f64) -> f64 {
    let u = (t - 0.2) / 0.8;
    if u <= 0.0 {
        1.0
    } else if u >= 1.0 {
        0.0
    } else {
        let a = (-1.0 / (1.0 - u)).exp();
        a / (a + (-1.0 / u).exp())
    }
}

/// `W_η` by direct real-space summation: the lattice sum of `w χ(|x|/R)`
/// minus its background `∫ w χ(|y|/R) dy / |Λ|`. The smooth window makes
/// the truncation error decay faster than any power of `R`.
pub fn field_energy_real_space(cfg: &PeriodicChargeConfig, sc: &SmearedCharge, radius: f64) -> Result<f64> {
    check_admissible(cfg, sc)?;
    let d = cfg.d;
    let vol = cfg.volume();
    let inner = 0.2 * radius;
    let mut background = if d == 2 {
        -2.0 * PI * (0.5 * inner * inner * inner.ln() - 0.25 * inner * inner)
    } else {
        2.0 * PI * inner * inner
    };
    let panels = 400;
    for p in 0..panels {
        let a = inner + (radius - inner) * p as f64 / panels as f64;
        let b = inner + (radius - inner) * (p + 1) as f64 / panels as f64;
        let (x, wt) = gauss_legendre(16, a, b);
        for (r, wr) in x.iter().zip(&wt) {
            let shell = if d == 2 { 2.0 * PI * r } else { 4.0 * PI * r * r };
            background += wr * shell * w(d, *r) * window(r / radius);
        }
    }
    let lat = cfg.lattice_vectors(radius + cfg.max_offset());
    let mut point_energy = 0.0;
    for (p, &np) in cfg.points.iter().zip(&cfg.multiplicities) {
        for (q, &nq) in cfg.points.iter().zip(&cfg.multiplicities) {
            let mut s = -background / vol;
            for l in &lat {
                let r = norm_diff_shift(p, q, l);
                if r > 0.0 && r < radius {
                    s += w(d, r) * window(r / radius);
                }
            }
            point_energy += np as f64 * nq as f64 * s;
        }
    }
    Ok(assemble(cfg, sc, point_energy).0)
}

/// `W_η` from Parseval: `⨍|E_η|² = c_d² Σ_{k≠0} |S(k)|² ρ̂(kη)² / (|Λ|² |k|²)`
/// truncated to `|k| ≤ k_max`. Slow for the uniform ball, spectral for
/// smooth profiles.
pub fn field_energy_fourier(cfg: &PeriodicChargeConfig, sc: &SmearedCharge, k_max: f64) -> Result<f64> {
    check_admissible(cfg, sc)?;
    let d = cfg.d;
    let c = coulomb_constant(d);
    let vol = cfg.volume();
    let mut s = 0.0;
    for k in vectors_within(&cfg.dual_basis(), &cfg.basis, k_max) {
        let k2: f64 = k.iter().map(|x| x * x).sum();
        if k2 == 0.0 {
            continue;
        }
        let ff = sc.form_factor(d, k2.sqrt() * sc.eta);
        s += cfg.structure_factor(&k) * ff * ff / k2;
    }
    Ok(c * c * s / (vol * vol) - cfg.m * c * sc.self_energy(d))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingReport {
    pub m: f64,
    /// `W_η(E)` at density `m`.
    pub lhs: f64,
    /// The same value from the unit-density configuration.
    pub rhs: f64,
    pub difference: f64,
}

/// Checks `W_η(E) = m^{2−2/d} W_{η m^{1/d}}(E′)` (`d = 3`) and
/// `W_η(E) = m (W_{η m^{1/2}}(E′) − (κ_2/2) log m)` (`d = 2`), where `E` is
/// `cfg` dilated to density `m` and `E′` the unit-density version.
pub fn scaling_check(cfg: &PeriodicChargeConfig, sc: &SmearedCharge, m: f64) -> Result<ScalingReport> {
    if !(m > 0.0) {
        return Err(Error::domain("m_scale must be positive"));
    }
    let d = cfg.d;
    let e = cfg.with_density(m)?;
    let e1 = cfg.with_density(1.0)?;
    let lhs = field_energy_eta(&e, sc)?.w_eta;
    let sc1 = SmearedCharge { eta: sc.eta * m.powf(1.0 / d as f64), ..*sc };
    let w1 = field_energy_eta(&e1, &sc1)?.w_eta;
    let rhs = if d == 2 { m * (w1 - PI * m.ln()) } else { m.powf(2.0 - 2.0 / d as f64) * w1 };
    Ok(ScalingReport { m, lhs, rhs, difference: lhs - rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn radial_laplacian(f: &dyn Fn(f64) -> f64, d: usize, r: f64) -> f64 {
        let h = 1e-3 * r;
        let (fp, f0, fm) = (f(r + h), f(r), f(r - h));
        (fp - 2.0 * f0 + fm) / (h * h) + (d as f64 - 1.0) / r * (fp - fm) / (2.0 * h)
    }

    #[test]
    fn kernels_match_closed_forms_and_poisson() {
        let eta = 0.3;
        let k2 = smeared_kernel(SmearedCharge::uniform(eta), 2).unwrap();
        let k3 = smeared_kernel(SmearedCharge::uniform(eta), 3).unwrap();
        for i in 1..30 {
            let r = eta * i as f64 / 30.0;
            let f2 = (r / eta).ln() + (eta * eta - r * r) / (2.0 * eta * eta);
            let f3 = (3.0 * eta * eta - r * r) / (2.0 * eta.powi(3)) - 1.0 / r;
            assert!((k2.eval(r) - f2).abs() < 1e-13);
            assert!((k3.eval(r) - f3).abs() < 1e-12 * f3.abs().max(1.0));
        }
        assert_eq!(k2.eval(eta), 0.0);
        assert!(k3.eval(eta * (1.0 - 1e-12)).abs() < 1e-9);
        // −Δf = c_d δ^{(η)} away from the origin, for a smooth profile too
        for d in [2, 3] {
            let sc = SmearedCharge { eta, profile: Profile::Bump(3) };
            let k = smeared_kernel(sc, d).unwrap();
            for r in [0.05, 0.12, 0.2, 0.27] {
                let lap = -radial_laplacian(&|x| k.eval(x), d, r);
                let rho = sc.unit_density(d, r / eta) / eta.powi(d as i32);
                assert!((lap / (coulomb_constant(d) * rho) - 1.0).abs() < 1e-3, "d={d} r={r}: {lap} vs {rho}");
            }
            assert!(k.eval(eta * 0.999_999).abs() < 1e-10);
        }
    }

    #[test]
    fn self_energies_against_double_integral() {
        // D = ∬ w(max(r, s)) dμ(r) dμ(s), by quadrature
        for (d, sc) in [(2, SmearedCharge::uniform(1.0)), (3, SmearedCharge::uniform(1.0)), (2, SmearedCharge { eta: 1.0, profile: Profile::Bump(2) }), (3, SmearedCharge { eta: 1.0, profile: Profile::Bump(2) })] {
            let (x, wx) = gauss_legendre(200, 0.0, 1.0);
            let shell = |u: f64| if d == 2 { 2.0 * PI * u } else { 4.0 * PI * u * u };
            let dens = |u: f64| shell(u) * sc.unit_density(d, u);
            let mut s = 0.0;
            for (r, wr) in x.iter().zip(&wx) {
                // split the inner integral at the kink of w(max(r, t))
                let (a, wa) = gauss_legendre(60, 0.0, *r);
                let (b, wb) = gauss_legendre(60, *r, 1.0);
                let inner: f64 = a.iter().zip(&wa).map(|(t, wt)| wt * dens(*t) * w(d, *r)).sum::<f64>()
                    + b.iter().zip(&wb).map(|(t, wt)| wt * dens(*t) * w(d, *t)).sum::<f64>();
                s += wr * dens(*r) * inner;
            }
            assert!((s - sc.unit_self_energy(d)).abs() < 1e-6, "d={d}: {s} vs {}", sc.unit_self_energy(d));
        }
        assert!((SmearedCharge::uniform(1.0).unit_self_energy(2) - 0.25).abs() < 1e-15);
        assert!((SmearedCharge::uniform(1.0).unit_self_energy(3) - 1.2).abs() < 1e-15);
        let k2 = kappa_constants(SmearedCharge::uniform(0.1), 2).unwrap();
        assert_eq!(k2.kappa, 2.0 * PI);
        assert!((k2.gamma2 - PI / 2.0).abs() < 1e-15);
        let k3 = kappa_constants(SmearedCharge::uniform(0.1), 3).unwrap();
        assert!((k3.kappa - 24.0 * PI / 5.0).abs() < 1e-13);
    }

    #[test]
    fn form_factors() {
        for d in [2, 3] {
            let sc = SmearedCharge { eta: 1.0, profile: Profile::Bump(0) };
            for q in [0.0, 0.5, 3.0, 17.0] {
                assert!((sc.form_factor(d, q) - SmearedCharge::uniform(1.0).form_factor(d, q)).abs() < 1e-12);
            }
            let b = SmearedCharge { eta: 1.0, profile: Profile::Bump(3) };
            let q = 1e-2;
            let series = 1.0 - q * q * b.second_moment(d) / (2.0 * d as f64);
            assert!((b.form_factor(d, q) - series).abs() < 1e-9);
        }
    }

    #[test]
    fn lattices_are_neutral_and_well_spaced() {
        for name in ["square", "triangular", "cubic", "bcc", "fcc"] {
            let c = PeriodicChargeConfig::named(name, 2.5).unwrap();
            assert!((c.volume() * 2.5 - 1.0).abs() < 1e-13);
        }
        let t = PeriodicChargeConfig::triangular(1.0).unwrap();
        assert!((t.min_distance() - (2.0 / 3f64.sqrt()).sqrt()).abs() < 1e-13);
        let fcc = PeriodicChargeConfig::fcc(1.0).unwrap();
        assert!((fcc.min_distance() - 2f64.sqrt() * 0.5f64.powf(1.0 / 3.0)).abs() < 1e-13);
        let bad = PeriodicChargeConfig::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![vec![0.0, 0.0]], vec![2], 1.0);
        assert!(bad.is_err());
        let sq = PeriodicChargeConfig::square(1.0).unwrap();
        assert!(field_energy_eta(&sq, &SmearedCharge::uniform(0.5)).is_err());
    }

    #[test]
    fn ewald_matches_real_space_sum() {
        let sq = PeriodicChargeConfig::square(1.0).unwrap();
        let sc = SmearedCharge::uniform(0.1);
        let ewald = field_energy_eta(&sq, &sc).unwrap().w_eta;
        let direct = field_energy_real_space(&sq, &sc, 80.0).unwrap();
        assert!((ewald - direct).abs() < 1e-6, "{ewald} vs {direct}");
        // two points per cell in 3D
        let cfg = PeriodicChargeConfig::new(
            vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.2, 0.0], vec![0.0, 0.0, 1.0]],
            vec![vec![0.0; 3], vec![0.4, 0.5, 0.3]],
            vec![1, 2],
            2.5,
        )
        .unwrap();
        let ewald = field_energy_eta(&cfg, &sc).unwrap().w_eta;
        let direct = field_energy_real_space(&cfg, &sc, 64.0).unwrap();
        assert!((ewald - direct).abs() < 1e-6, "{ewald} vs {direct}");
    }

    #[test]
    fn ewald_matches_parseval_for_smooth_profile() {
        let sc = SmearedCharge { eta: 0.2, profile: Profile::Bump(4) };
        let cfg = PeriodicChargeConfig::new(
            vec![vec![1.0, 0.0], vec![0.3, 1.1]],
            vec![vec![0.0, 0.0], vec![0.6, 0.5]],
            vec![1, 1],
            2.0 / 1.1,
        )
        .unwrap();
        let ewald = field_energy_eta(&cfg, &sc).unwrap().w_eta;
        let fourier = field_energy_fourier(&cfg, &sc, 400.0).unwrap();
        assert!((ewald - fourier).abs() < 1e-8, "{ewald} vs {fourier}");
    }

    #[test]
    fn supercell_rotation_and_relabeling() {
        let sc = SmearedCharge::uniform(0.1);
        for cfg in [PeriodicChargeConfig::triangular(1.0).unwrap(), PeriodicChargeConfig::bcc(1.0).unwrap()] {
            let base = field_energy_eta(&cfg, &sc).unwrap().w_eta;
            let big = cfg.supercell(2);
            assert!((field_energy_eta(&big, &sc).unwrap().w_eta - base).abs() < 1e-10);
            let mut relabeled = big.clone();
            relabeled.points.reverse();
            assert!((field_energy_eta(&relabeled, &sc).unwrap().w_eta - base).abs() < 1e-10);
            assert!((field_energy_eta(&cfg.rotated(0.7), &sc).unwrap().w_eta - base).abs() < 1e-11);
        }
    }

    #[test]
    fn triangular_beats_square_and_scaling_holds() {
        for eta in [0.1, 0.05] {
            let sc = SmearedCharge::uniform(eta);
            let tri = field_energy_eta(&PeriodicChargeConfig::triangular(1.0).unwrap(), &sc).unwrap().w_eta;
            let sq = field_energy_eta(&PeriodicChargeConfig::square(1.0).unwrap(), &sc).unwrap().w_eta;
            assert!(tri < sq, "{tri} vs {sq}");
        }
        let sc = SmearedCharge::uniform(0.05);
        let r = scaling_check(&PeriodicChargeConfig::triangular(1.0).unwrap(), &sc, 4.0).unwrap();
        assert!(r.difference.abs() < 1e-8, "{r:?}");
        let r = scaling_check(&PeriodicChargeConfig::cubic(1.0).unwrap(), &sc, 8.0).unwrap();
        assert!(r.difference.abs() < 1e-8, "{r:?}");
        let r = scaling_check(&PeriodicChargeConfig::square(1.0).unwrap(), &sc, 1.0).unwrap();
        assert_eq!(r.difference, 0.0);
    }

    #[test]
    fn shape_gap_shrinks_with_eta() {
        let cfg = PeriodicChargeConfig::square(1.0).unwrap();
        let mut prev = f64::INFINITY;
        for eta in [0.2, 0.1, 0.05, 0.025] {
            let a = field_energy_eta(&cfg, &SmearedCharge::uniform(eta)).unwrap().w_eta;
            let b = field_energy_eta(&cfg, &SmearedCharge { eta, profile: Profile::Bump(2) }).unwrap().w_eta;
            let gap = (a - b).abs();
            assert!(gap < prev);
            prev = gap;
        }
        assert!(prev < 1e-2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn invariant_under_rigid_motions_and_lattice_shifts(
            x in 0.25f64..0.75, y in 0.25f64..0.75, angle in 0.0f64..6.3, shift in -3i32..3,
        ) {
            let cfg = PeriodicChargeConfig::new(
                vec![vec![1.0, 0.0], vec![0.2, 1.0]],
                vec![vec![0.0, 0.0], vec![x, y]],
                vec![1, 1],
                2.0,
            ).unwrap();
            let sc = SmearedCharge::uniform(0.05);
            let base = field_energy_eta(&cfg, &sc).unwrap().w_eta;
            let rot = field_energy_eta(&cfg.rotated(angle), &sc).unwrap().w_eta;
            prop_assert!((rot - base).abs() < 1e-10);
            let mut moved = cfg.clone();
            moved.points[1][0] += shift as f64;
            for p in &mut moved.points {
                p[1] += 0.3;
            }
            let w = field_energy_eta(&moved, &sc).unwrap().w_eta;
            prop_assert!((w - base).abs() < 1e-10);
        }
    }
}
