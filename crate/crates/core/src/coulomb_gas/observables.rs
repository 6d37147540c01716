//! Reductions of sampled configurations: radial histograms, kernel smoothing,
//! distances to an equilibrium measure, charge deviations.

use std::f64::consts::PI;

use super::equilibrium::{EquilibriumMeasure, RadialLaw};
use super::hamiltonian::{dist, ParticleConfiguration};
use crate::numerics::optimize::golden_section;
use crate::numerics::quadrature::gauss_legendre;
use crate::numerics::special::bessel_i0_scaled;

/// Histogram of a rotation-invariant law on `ℝ^d` by radius.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialHistogram {
    pub d: usize,
    /// Equispaced bin edges starting at 0.
    pub edges: Vec<f64>,
    /// Probability mass per bin; mass beyond the last edge is dropped.
    pub mass: Vec<f64>,
}

fn shell_volume(d: usize, a: f64, b: f64) -> f64 {
    if d == 2 {
        PI * (b * b - a * a)
    } else {
        4.0 / 3.0 * PI * (b * b * b - a * a * a)
    }
}

impl RadialHistogram {
    pub fn from_radii(radii: &[f64], d: usize, r_max: f64, bins: usize) -> Self {
        let bins = bins.max(1);
        let h = r_max / bins as f64;
        let edges = (0..=bins).map(|i| i as f64 * h).collect();
        let mut mass = vec![0.0; bins];
        let w = 1.0 / radii.len().max(1) as f64;
        for &r in radii {
            let k = (r / h) as usize;
            if k < bins {
                mass[k] += w;
            }
        }
        RadialHistogram { d, edges, mass }
    }

    pub fn bin_width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Density per unit volume in each bin.
    pub fn density(&self) -> Vec<f64> {
        self.edges.windows(2).zip(&self.mass).map(|(w, m)| m / shell_volume(self.d, w[0], w[1])).collect()
    }

    pub fn max_density(&self) -> f64 {
        self.density().into_iter().fold(0.0, f64::max)
    }

    /// Convolution with an isotropic Gaussian of standard deviation `h` per
    /// coordinate, each bin treated as a uniform sphere at its centre.
    pub fn smoothed(&self, h: f64) -> RadialHistogram {
        let c = self.centers();
        let mut mass = vec![0.0; c.len()];
        for (t, (&r, w)) in c.iter().zip(self.edges.windows(2)).enumerate() {
            let mut rho = 0.0;
            for (&s, &m) in c.iter().zip(&self.mass) {
                if m == 0.0 {
                    continue;
                }
                rho += m * sphere_kernel(self.d, r, s, h);
            }
            mass[t] = rho * shell_volume(self.d, w[0], w[1]);
        }
        RadialHistogram { d: self.d, edges: self.edges.clone(), mass }
    }

    /// The histogram as a piecewise-constant radial measure.
    pub fn to_measure(&self) -> EquilibriumMeasure {
        EquilibriumMeasure { d: self.d, law: RadialLaw::Shells { edges: self.edges.clone(), masses: self.mass.clone() } }
    }

    /// Mass within radius `r`, linear in `r^d` inside a bin.
    pub fn cdf(&self, r: f64) -> f64 {
        let h = self.bin_width();
        let k = ((r / h).floor().max(0.0) as usize).min(self.mass.len());
        let mut m: f64 = self.mass[..k].iter().sum();
        if k < self.mass.len() {
            let (a, b) = (self.edges[k], self.edges[k + 1]);
            let d = self.d as i32;
            m += self.mass[k] * (r.powi(d) - a.powi(d)) / (b.powi(d) - a.powi(d));
        }
        m
    }
}

/// Density at radius `r` of a unit mass spread uniformly on the sphere of
/// radius `s`, convolved with a centred Gaussian of variance `h²`.
fn sphere_kernel(d: usize, r: f64, s: f64, h: f64) -> f64 {
    let h2 = h * h;
    let g = (-(r - s) * (r - s) / (2.0 * h2)).exp();
    if d == 2 {
        g * bessel_i0_scaled(r * s / h2) / (2.0 * PI * h2)
    } else {
        g * -(-2.0 * r * s / h2).exp_m1() / (4.0 * PI * r * s * (2.0 * PI).sqrt() * h)
    }
}

/// Difference of radial mass functions `F_hist − M_μ₀`, averaged over each of
/// `cells` equal cells of `[0, r_max]`, plus its value at `r_max`.
fn cdf_gap(hist: &RadialHistogram, mu0: &EquilibriumMeasure, cells: usize) -> (f64, Vec<f64>, f64) {
    let r_max = *hist.edges.last().unwrap();
    let dr = r_max / cells as f64;
    let (x, w) = gauss_legendre(8, 0.0, 1.0);
    let avg = (0..cells)
        .map(|k| {
            let a = k as f64 * dr;
            x.iter().zip(&w).map(|(&t, &q)| q * (hist.cdf(a + t * dr) - mu0.mass_within(a + t * dr))).sum()
        })
        .collect();
    (dr, avg, hist.cdf(r_max) - mu0.mass_within(r_max))
}

/// `W₁` distance between the rotation-invariant measures with these radial
/// laws: `∫ |F_hist − M_μ₀| dr`.
pub fn radial_w1_distance(hist: &RadialHistogram, mu0: &EquilibriumMeasure) -> f64 {
    let (dr, gap, _) = cdf_gap(hist, mu0, 4000);
    dr * gap.iter().map(|g| g.abs()).sum::<f64>()
}

/// Bounded-Lipschitz distance `sup { ∫ f d(ν − μ₀) : ‖f‖_∞ + Lip(f) ≤ 1 }`
/// between the rotation-invariant measure with radial law `hist` and `μ₀`.
///
/// Averaging a test function over rotations does not increase either norm, so
/// the supremum runs over radial `f`. For a fixed Lipschitz constant `L` the
/// one-dimensional problem is solved by dynamic programming over quantized
/// values of piecewise-linear `f`; the optimum is concave in `L`.
pub fn bl_distance(hist: &RadialHistogram, mu0: &EquilibriumMeasure) -> f64 {
    let (dr, gap, tail) = cdf_gap(hist, mu0, 200);
    let value = |l: f64| -> f64 {
        let bound = 1.0 - l;
        if bound <= 0.0 {
            return 0.0;
        }
        const SUB: usize = 4;
        const MAX_LEVELS: usize = 20_000;
        let delta = (l * dr / SUB as f64).max(2.0 * bound / MAX_LEVELS as f64);
        let levels = (2.0 * bound / delta).floor() as usize + 1;
        let reach = if l > 0.0 { ((l * dr / delta) + 1e-9).floor() as usize } else { 0 };
        let f = |j: usize| -bound + j as f64 * delta;
        // ∫ f dσ = f(r_max) G(r_max) − Σ_k (f_{k+1} − f_k) Ḡ_k
        let mut next: Vec<f64> = (0..levels).map(|j| f(j) * tail).collect();
        let mut cur = vec![0.0; levels];
        for g in gap.iter().rev() {
            for j in 0..levels {
                let lo = j.saturating_sub(reach);
                let hi = (j + reach).min(levels - 1);
                let mut best = f64::NEG_INFINITY;
                for jj in lo..=hi {
                    best = best.max(next[jj] - (f(jj) - f(j)) * g);
                }
                cur[j] = best;
            }
            std::mem::swap(&mut cur, &mut next);
        }
        next.into_iter().fold(f64::NEG_INFINITY, f64::max)
    };
    let (_, best) = golden_section(|l| -value(l), 0.0, 1.0, 1e-3);
    (-best).max(value(0.0))
}

/// `#{points in B(x, R)} − n μ₀(B(x, R))`.
pub fn charge_deviation(sample: &ParticleConfiguration, mu0: &EquilibriumMeasure, x: &[f64], radius: f64) -> f64 {
    let inside = (0..sample.n()).filter(|&i| dist(sample.point(i), x) < radius).count();
    inside as f64 - sample.n() as f64 * mu0.mass_in_ball(x, radius)
}

/// Inner and outer radius of the flat 2D annulus with the same mean and
/// variance of `r²` (uniform on `[r₁², r₂²]`).
pub fn annulus_radii(radii: &[f64]) -> (f64, f64) {
    let n = radii.len() as f64;
    let mean = radii.iter().map(|r| r * r).sum::<f64>() / n;
    let var = radii.iter().map(|r| (r * r - mean).powi(2)).sum::<f64>() / n;
    let half = 3f64.sqrt() * var.sqrt();
    ((mean - half).max(0.0).sqrt(), (mean + half).sqrt())
}

pub fn excess_kurtosis(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let m2 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let m4 = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    m4 / (m2 * m2) - 3.0
}

/// Smoothing bandwidth `n^{-1/4}` for `n` particles.
pub fn default_bandwidth(n: usize) -> f64 {
    (n.max(1) as f64).powf(-0.25)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coulomb_gas::{equilibrium_measure_radial, Potential};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform_disc(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random::<f64>().sqrt()).collect()
    }

    #[test]
    fn smoothing_preserves_mass() {
        for d in [2, 3] {
            let r = uniform_disc(20_000, 1);
            let h = RadialHistogram::from_radii(&r, d, 4.0, 400);
            let s = h.smoothed(0.2);
            let total: f64 = s.mass.iter().sum();
            assert!((total - 1.0).abs() < 2e-3, "d = {d}: {total}");
        }
    }

    #[test]
    fn distances_vanish_on_exact_law() {
        let mu0 = equilibrium_measure_radial(&Potential::harmonic(), 2, 1.0).unwrap();
        let bins = 800;
        let edges: Vec<f64> = (0..=bins).map(|i| i as f64 * 2.0 / bins as f64).collect();
        let mass = edges.windows(2).map(|w| mu0.mass_within(w[1]) - mu0.mass_within(w[0])).collect();
        let hist = RadialHistogram { d: 2, edges, mass };
        assert!(radial_w1_distance(&hist, &mu0) < 1e-6);
        assert!(bl_distance(&hist, &mu0) < 1e-6);
        assert!((hist.max_density() - 1.0 / PI).abs() < 1e-9);
    }

    #[test]
    fn bl_is_below_w1_and_matches_a_shift() {
        // Disc of radius 1 against disc of radius 1.05: W₁ = 0.05·(2/3).
        let mu0 = equilibrium_measure_radial(&Potential::harmonic(), 2, 1.0).unwrap();
        let big = EquilibriumMeasure { d: 2, law: RadialLaw::Annulus { r1: 0.0, r2: 1.05 } };
        let bins = 800;
        let edges: Vec<f64> = (0..=bins).map(|i| i as f64 * 2.0 / bins as f64).collect();
        let mass = edges.windows(2).map(|w| big.mass_within(w[1]) - big.mass_within(w[0])).collect();
        let hist = RadialHistogram { d: 2, edges, mass };
        let w1 = radial_w1_distance(&hist, &mu0);
        assert!((w1 - 0.05 * 2.0 / 3.0).abs() < 1e-4);
        let bl = bl_distance(&hist, &mu0);
        // G = F_ν − M_μ₀ ≤ 0, so the optimal f rises with slope L on a window
        // of length 2(1 − L)/L where ∫|G| is largest and is flat elsewhere.
        let m = 20_000;
        let h = 1.05 / m as f64;
        let mut cum = vec![0.0];
        for i in 0..m {
            let r = (i as f64 + 0.5) * h;
            cum.push(cum[i] + h * (mu0.mass_within(r) - big.mass_within(r)));
        }
        let expected = (30..100)
            .map(|k| {
                let l = k as f64 / 100.0;
                let w = ((2.0 * (1.0 - l) / l / h) as usize).min(m);
                l * (w..=m).map(|j| cum[j] - cum[j - w]).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        assert!(bl <= w1 && (bl - expected).abs() < 0.01 * expected, "bl {bl} vs {expected}");
    }

    #[test]
    fn charge_deviation_sanity() {
        let mu0 = equilibrium_measure_radial(&Potential::harmonic(), 2, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut pts = Vec::new();
        for _ in 0..200 {
            let (r, t) = (rng.random::<f64>().sqrt(), rng.random::<f64>() * 2.0 * PI);
            pts.extend([r * t.cos(), r * t.sin()]);
        }
        let cfg = ParticleConfiguration::new(2, pts).unwrap();
        assert!(charge_deviation(&cfg, &mu0, &[0.0, 0.0], 1.5).abs() < 1e-9);
        let radii: Vec<f64> = cfg.radii().collect();
        let own = RadialHistogram::from_radii(&radii, 2, 2.0, 200).to_measure();
        assert!(charge_deviation(&cfg, &own, &[0.0, 0.0], 1.99).abs() <= 0.5);
        assert!(charge_deviation(&cfg, &mu0, &[0.2, 0.1], 0.5).abs() < 40.0);
    }

    #[test]
    fn annulus_estimator_and_kurtosis() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let r: Vec<f64> = (0..100_000).map(|_| (1.0 + 2.0 * rng.random::<f64>()).sqrt()).collect();
        let (a, b) = annulus_radii(&r);
        assert!((a - 1.0).abs() < 0.01 && (b - 3f64.sqrt()).abs() < 0.01);
        let u: Vec<f64> = (0..100_000).map(|_| rng.random::<f64>()).collect();
        assert!((excess_kurtosis(&u) + 1.2).abs() < 0.03);
    }
}
