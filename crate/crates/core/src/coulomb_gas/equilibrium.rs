use std::f64::consts::PI;

use super::hamiltonian::{pair_w, Potential};
use crate::numerics::quadrature::gauss_legendre;
use crate::{Error, Result};

/// Radial probability laws with closed-form mass functions.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialLaw {
    /// Density `∝ r^{s−2}` on the ball of radius `radius`.
    Power { s: f64, radius: f64 },
    /// Uniform on the annulus `r1 ≤ r ≤ r2` (a disc when `r1 = 0`).
    Annulus { r1: f64, r2: f64 },
    /// Piecewise-constant density on shells `[edges[i], edges[i+1]]` with
    /// shell masses `masses[i]`.
    Shells { edges: Vec<f64>, masses: Vec<f64> },
}

/// A radial probability measure on `ℝ^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumMeasure {
    pub d: usize,
    pub law: RadialLaw,
}

fn ball_volume(d: usize, r: f64) -> f64 {
    if d == 2 {
        PI * r * r
    } else {
        4.0 / 3.0 * PI * r * r * r
    }
}

fn sphere_area(d: usize, r: f64) -> f64 {
    if d == 2 {
        2.0 * PI * r
    } else {
        4.0 * PI * r * r
    }
}

impl EquilibriumMeasure {
    /// Density per unit volume at radius `r`.
    pub fn density(&self, r: f64) -> f64 {
        let d = self.d as f64;
        match &self.law {
            RadialLaw::Power { s, radius } => {
                if r > *radius || r < 0.0 {
                    return 0.0;
                }
                // M(r) = (r/R)^{s+d−2}, density = M'(r) / |S^{d−1}| r^{d−1}
                let p = s + d - 2.0;
                p * r.powf(p - 1.0) / radius.powf(p) / sphere_area(self.d, 1.0) / r.powf(d - 1.0)
            }
            RadialLaw::Annulus { r1, r2 } => {
                if r < *r1 || r > *r2 {
                    0.0
                } else {
                    1.0 / (ball_volume(self.d, *r2) - ball_volume(self.d, *r1))
                }
            }
            RadialLaw::Shells { edges, masses } => match shell_index(edges, r) {
                Some(i) => masses[i] / (ball_volume(self.d, edges[i + 1]) - ball_volume(self.d, edges[i])),
                None => 0.0,
            },
        }
    }

    /// `μ(B(0, r))`.
    pub fn mass_within(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let d = self.d as f64;
        match &self.law {
            RadialLaw::Power { s, radius } => (r / radius).min(1.0).powf(s + d - 2.0),
            RadialLaw::Annulus { r1, r2 } => {
                let rr = r.clamp(*r1, *r2);
                (rr.powf(d) - r1.powf(d)) / (r2.powf(d) - r1.powf(d))
            }
            RadialLaw::Shells { edges, masses } => {
                let mut m = 0.0;
                for i in 0..masses.len() {
                    let (a, b) = (edges[i], edges[i + 1]);
                    if r >= b {
                        m += masses[i];
                    } else {
                        if r > a {
                            m += masses[i] * (r.powf(d) - a.powf(d)) / (b.powf(d) - a.powf(d));
                        }
                        break;
                    }
                }
                m
            }
        }
    }

    /// Inner and outer radius of the support.
    pub fn support(&self) -> (f64, f64) {
        match &self.law {
            RadialLaw::Power { radius, .. } => (0.0, *radius),
            RadialLaw::Annulus { r1, r2 } => (*r1, *r2),
            RadialLaw::Shells { edges, masses } => {
                let first = masses.iter().position(|&m| m > 0.0).unwrap_or(0);
                let last = masses.iter().rposition(|&m| m > 0.0).unwrap_or(0);
                (edges[first], edges[last + 1])
            }
        }
    }

    /// Radii where the density is discontinuous or non-smooth.
    fn breakpoints(&self) -> Vec<f64> {
        match &self.law {
            RadialLaw::Shells { edges, .. } => edges.clone(),
            _ => {
                let (a, b) = self.support();
                vec![a, b]
            }
        }
    }

    /// Total mass by Gauss-Legendre quadrature of the density, independent of
    /// the closed-form mass function.
    pub fn total_mass(&self) -> f64 {
        let bp = self.breakpoints();
        let mut total = 0.0;
        for w in bp.windows(2) {
            if w[1] <= w[0] {
                continue;
            }
            let (x, q) = gauss_legendre(16, w[0], w[1]);
            total += x.iter().zip(&q).map(|(&r, &wt)| wt * sphere_area(self.d, r) * self.density(r)).sum::<f64>();
        }
        total
    }

    /// `(r, density)` on `n` equispaced radii of `[0, r_max]`.
    pub fn tabulate(&self, r_max: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
        let h = r_max / (n.max(2) - 1) as f64;
        let r: Vec<f64> = (0..n.max(2)).map(|i| i as f64 * h).collect();
        let v = r.iter().map(|&x| self.density(x)).collect();
        (r, v)
    }

    /// `μ(B(center, radius))` for a ball not necessarily centred at 0.
    pub fn mass_in_ball(&self, center: &[f64], radius: f64) -> f64 {
        let a = center.iter().map(|x| x * x).sum::<f64>().sqrt();
        if radius <= 0.0 {
            return 0.0;
        }
        if a == 0.0 {
            return self.mass_within(radius);
        }
        // Shells fully inside the ball, then the partially covered ones.
        let full = if radius > a { self.mass_within(radius - a) } else { 0.0 };
        let lo = (a - radius).abs();
        let hi = a + radius;
        // ρ = mid − half·cos φ removes the square-root endpoint behaviour of the arc length.
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let phi = |rho: f64| ((mid - rho) / half).clamp(-1.0, 1.0).acos();
        let mut cuts: Vec<f64> = self.breakpoints().into_iter().filter(|&b| b > lo && b < hi).map(phi).collect();
        cuts.insert(0, 0.0);
        cuts.push(PI);
        let mut partial = 0.0;
        for w in cuts.windows(2) {
            let (x, q) = gauss_legendre(16, w[0], w[1]);
            for (&t, &wt) in x.iter().zip(&q) {
                let rho = mid - half * t.cos();
                let c = ((rho * rho + a * a - radius * radius) / (2.0 * rho * a)).clamp(-1.0, 1.0);
                let covered = if self.d == 2 {
                    2.0 * rho * c.acos()
                } else {
                    2.0 * PI * rho * rho * (1.0 - c)
                };
                partial += wt * half * t.sin() * covered * self.density(rho);
            }
        }
        full + partial
    }
}

fn shell_index(edges: &[f64], r: f64) -> Option<usize> {
    if edges.len() < 2 || r < edges[0] || r > edges[edges.len() - 1] {
        return None;
    }
    let i = edges.partition_point(|&e| e <= r);
    Some(i.saturating_sub(1).min(edges.len() - 2))
}

/// Minimizer of `∫V μ + c ∬ w μ μ` for the implemented radial classes.
///
/// Force balance gives density `ΔV/(2 c c_d)` on the support, with
/// `c₂ = 2π`, `c₃ = 4π`:
/// * `V = a|x|^s`: a ball with `R^s = 2c/(a s)` (2D) or `R^{s+1} = 2c/(a s)` (3D);
/// * `V = a(|x|² − 2γ log|x|)` (2D): the annulus `γ ≤ r² ≤ γ + c/a` with density `a/(π c)`.
pub fn equilibrium_measure_radial(v: &Potential, d: usize, coefficient: f64) -> Result<EquilibriumMeasure> {
    if !(d == 2 || d == 3) {
        return Err(Error::invalid(format!("dimension {d} not supported")));
    }
    if !(coefficient > 0.0) {
        return Err(Error::domain("interaction coefficient must be positive"));
    }
    match *v {
        Potential::Power { s, scale } if s > 0.0 && scale > 0.0 => {
            let p = if d == 2 { s } else { s + 1.0 };
            let radius = (2.0 * coefficient / (scale * s)).powf(1.0 / p);
            Ok(EquilibriumMeasure { d, law: RadialLaw::Power { s, radius } })
        }
        Potential::LogPerturbed { gamma, scale } if d == 2 && gamma >= 0.0 && scale > 0.0 => Ok(EquilibriumMeasure {
            d,
            law: RadialLaw::Annulus { r1: gamma.sqrt(), r2: (gamma + coefficient / scale).sqrt() },
        }),
        _ => Err(Error::invalid(format!("potential {v:?} in d = {d} is outside the implemented radial class"))),
    }
}

/// Mean-field energy `Σ m_k V(r_k) + c Σ_{k,l} m_k m_l w(max(r_k, r_l))` of
/// a measure made of thin uniform shells, exact by Newton's theorem.
pub fn shell_energy(radii: &[f64], masses: &[f64], v: &Potential, coefficient: f64, d: usize) -> f64 {
    let mut idx: Vec<usize> = (0..radii.len()).collect();
    idx.sort_by(|&a, &b| radii[a].total_cmp(&radii[b]));
    let mut inside = 0.0;
    let mut e = 0.0;
    for &k in &idx {
        let (r, m) = (radii[k], masses[k]);
        let w = pair_w(d, r);
        e += m * v.eval_radius(r) + coefficient * (m * m * w + 2.0 * m * w * inside);
        inside += m;
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn harmonic_equilibria() {
        let m2 = equilibrium_measure_radial(&Potential::harmonic(), 2, 1.0).unwrap();
        assert!((m2.density(0.3) - 1.0 / PI).abs() < 1e-14);
        assert_eq!(m2.support(), (0.0, 1.0));
        let m3 = equilibrium_measure_radial(&Potential::harmonic(), 3, 1.0).unwrap();
        assert!((m3.density(0.5) - 3.0 / (4.0 * PI)).abs() < 1e-14);
        assert!((m3.support().1 - 1.0).abs() < 1e-14);
        for m in [&m2, &m3] {
            assert!((m.total_mass() - 1.0).abs() < 1e-8);
        }
        let quartic = equilibrium_measure_radial(&Potential::Power { s: 4.0, scale: 1.0 }, 2, 1.0).unwrap();
        assert!((quartic.total_mass() - 1.0).abs() < 1e-8);
        let ann = equilibrium_measure_radial(&Potential::LogPerturbed { gamma: 1.0, scale: 1.0 }, 2, 2.0).unwrap();
        assert_eq!(ann.support(), (1.0, 3f64.sqrt()));
        assert!((ann.density(1.2) - 1.0 / (2.0 * PI)).abs() < 1e-14);
        assert!((ann.total_mass() - 1.0).abs() < 1e-8);
        assert!(equilibrium_measure_radial(&Potential::Zero, 2, 1.0).is_err());
    }

    #[test]
    fn ball_masses() {
        let m = equilibrium_measure_radial(&Potential::harmonic(), 2, 1.0).unwrap();
        // Off-centre disc fully inside the support: area/π.
        assert!((m.mass_in_ball(&[0.3, 0.1], 0.4) - 0.16).abs() < 1e-10);
        assert!((m.mass_in_ball(&[0.5, 0.0], 3.0) - 1.0).abs() < 1e-12);
        let m3 = equilibrium_measure_radial(&Potential::harmonic(), 3, 1.0).unwrap();
        assert!((m3.mass_in_ball(&[0.1, 0.2, 0.0], 0.5) - 0.125).abs() < 1e-10);
    }

    fn discretize(m: &EquilibriumMeasure, r_max: f64, k: usize) -> (Vec<f64>, Vec<f64>) {
        let h = r_max / k as f64;
        let radii: Vec<f64> = (0..k).map(|i| (i as f64 + 0.5) * h).collect();
        let masses = (0..k).map(|i| m.mass_within((i + 1) as f64 * h) - m.mass_within(i as f64 * h)).collect();
        (radii, masses)
    }

    #[test]
    fn minimal_against_random_perturbations() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (d, v) in [(2, Potential::harmonic()), (3, Potential::harmonic()), (2, Potential::LogPerturbed { gamma: 0.5, scale: 1.0 })] {
            let m = equilibrium_measure_radial(&v, d, 1.0).unwrap();
            let (radii, masses) = discretize(&m, 2.0, 2000);
            let e0 = shell_energy(&radii, &masses, &v, 1.0, d);
            for _ in 0..20 {
                // Mix in a random radial probability measure.
                let bumps: Vec<(f64, f64)> = (0..3).map(|_| (rng.random_range(0.05..1.9), rng.random_range(0.02..0.3))).collect();
                let mut nu: Vec<f64> = radii
                    .iter()
                    .map(|&r| bumps.iter().map(|(c, w)| (-(r - c).powi(2) / (2.0 * w * w)).exp()).sum())
                    .collect();
                let total: f64 = nu.iter().sum();
                nu.iter_mut().for_each(|x| *x /= total);
                let eps = rng.random_range(0.01..0.2);
                let pert: Vec<f64> = masses.iter().zip(&nu).map(|(a, b)| (1.0 - eps) * a + eps * b).collect();
                assert!(shell_energy(&radii, &pert, &v, 1.0, d) >= e0);
            }
        }
    }
}
