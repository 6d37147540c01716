//! Laughlin and quasi-hole states as 2D one-component plasmas.
//!
//! In the variables `Z = z/√(N−1)` the modulus squared of
//! `Π z_j^m Π_{i<j}(z_i − z_j)^ℓ e^{−Σ|z_j|²/2}` is, up to normalization,
//! `exp(−N H_N(Z))` with
//! `H_N = Σ|z_j|² + 2ℓ/(N−1) Σ_{i<j} −log|z_i − z_j| − 2m/(N−1) Σ log|z_j|`.
//! This is the Gibbs state `exp(−(β/2) H_n)` of [`GibbsChain`](super::GibbsChain) with
//! `β = 2ℓN/(N−1)` and `V = (N−1)/(ℓN) (|z|² − 2m/(N−1) log|z|)`.

use super::equilibrium::{equilibrium_measure_radial, EquilibriumMeasure};
use super::hamiltonian::{dist, ParticleConfiguration, Potential};
use super::metropolis::{run_chains, ChainSummary, SamplerOptions};
use super::observables::{annulus_radii, default_bandwidth, excess_kurtosis, RadialHistogram};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaughlinPlasmaSpec {
    pub n: usize,
    pub ell: u32,
    pub m: u32,
}

impl LaughlinPlasmaSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::domain("the plasma needs N ≥ 2"));
        }
        if self.ell == 0 {
            return Err(Error::domain("the Laughlin exponent must be ≥ 1"));
        }
        Ok(())
    }

    pub fn beta(&self) -> f64 {
        let n = self.n as f64;
        2.0 * self.ell as f64 * n / (n - 1.0)
    }

    pub fn potential(&self) -> Potential {
        let n = self.n as f64;
        Potential::LogPerturbed { gamma: self.m as f64 / (n - 1.0), scale: (n - 1.0) / (self.ell as f64 * n) }
    }

    /// `−N H_N(Z)`, the unnormalized log-density in scaled variables.
    pub fn log_density(&self, z: &ParticleConfiguration) -> f64 {
        let n = self.n as f64;
        let (ell, m) = (self.ell as f64, self.m as f64);
        let mut h = 0.0;
        for i in 0..z.n() {
            let r = z.radius(i);
            h += r * r - 2.0 * m / (n - 1.0) * r.ln();
            for j in i + 1..z.n() {
                h -= 2.0 * ell / (n - 1.0) * dist(z.point(i), z.point(j)).ln();
            }
        }
        -n * h
    }

    /// Zero-temperature density of the plasma: `1/(π ℓ')` with `ℓ' = ℓN/(N−1)`
    /// on `m/(N−1) ≤ r² ≤ (m + ℓN)/(N−1)`.
    pub fn mean_field(&self) -> Result<EquilibriumMeasure> {
        equilibrium_measure_radial(&self.potential(), 2, 1.0)
    }
}

#[derive(Debug, Clone)]
pub struct LaughlinRun {
    pub spec: LaughlinPlasmaSpec,
    pub summary: ChainSummary,
    pub histogram: RadialHistogram,
    pub bandwidth: f64,
    pub smoothed: RadialHistogram,
}

impl LaughlinRun {
    /// Incompressibility reference `1/(πℓ)`.
    pub fn cap(&self) -> f64 {
        1.0 / (std::f64::consts::PI * self.spec.ell as f64)
    }

    pub fn max_smoothed_density(&self) -> f64 {
        self.smoothed.max_density()
    }

    /// Radii of the flat annulus matching the first two moments of `r²`.
    pub fn annulus_radii(&self) -> (f64, f64) {
        annulus_radii(&self.summary.radii())
    }

    pub fn radial_excess_kurtosis(&self) -> f64 {
        excess_kurtosis(&self.summary.radii())
    }
}

/// Samples the scaled plasma and estimates its one-particle density.
pub fn laughlin_sampler(spec: &LaughlinPlasmaSpec, opts: &SamplerOptions) -> Result<LaughlinRun> {
    spec.validate()?;
    let summary = run_chains(2, spec.n, spec.beta(), spec.potential(), opts)?;
    let (r1, r2) = spec.mean_field()?.support();
    let bandwidth = default_bandwidth(spec.n);
    let width = (r2 - r1).max(1e-3);
    let bin = (width / 40.0).min(0.01);
    let r_max = r2 + 4.0 * bandwidth + 0.5 * width;
    let bins = ((r_max / bin).ceil() as usize).min(20_000);
    let histogram = RadialHistogram::from_radii(&summary.radii(), 2, r_max, bins);
    let smoothed = histogram.smoothed(bandwidth);
    Ok(LaughlinRun { spec: *spec, summary, histogram, bandwidth, smoothed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coulomb_gas::{hamiltonian, GibbsChain};

    #[test]
    fn log_density_matches_chain_target() {
        let spec = LaughlinPlasmaSpec { n: 7, ell: 3, m: 4 };
        let a = GibbsChain::new(2, 7, spec.beta(), spec.potential(), 1).unwrap().config();
        let b = GibbsChain::new(2, 7, spec.beta(), spec.potential(), 2).unwrap().config();
        let lhs = spec.log_density(&a) - spec.log_density(&b);
        let h = |c: &ParticleConfiguration| hamiltonian(c, &spec.potential()).unwrap();
        let rhs = -0.5 * spec.beta() * (h(&a) - h(&b));
        assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0));
    }

    #[test]
    fn mean_field_annulus() {
        let spec = LaughlinPlasmaSpec { n: 101, ell: 2, m: 100 };
        let (r1, r2) = spec.mean_field().unwrap().support();
        assert!((r1 - 1.0).abs() < 1e-12);
        assert!((r2 * r2 - 302.0 / 100.0).abs() < 1e-12);
        assert!(LaughlinPlasmaSpec { n: 1, ell: 2, m: 0 }.validate().is_err());
    }

    #[test]
    fn small_plasma_runs() {
        let spec = LaughlinPlasmaSpec { n: 20, ell: 1, m: 0 };
        let opts = SamplerOptions { sweeps: 2000, warmup: 200, thin: 10, chains: 2, seed: 3 };
        let run = laughlin_sampler(&spec, &opts).unwrap();
        let total: f64 = run.histogram.mass.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(run.max_smoothed_density() < 1.3 * run.cap());
    }
}
