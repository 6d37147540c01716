//! Single-site random-walk Metropolis for `exp(−(β/2) H_n)`.
//!
//! Pair terms touching the moving particle are recomputed against a cache of
//! inverse squared distances (2D) or inverse distances (3D), so a proposal
//! costs `O(n)` and needs at most a handful of logarithms.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::equilibrium::equilibrium_measure_radial;
use super::hamiltonian::{hamiltonian, ParticleConfiguration, Potential};
use crate::numerics::rng::{stream_rng, stream_seed};
use crate::{Error, Result};

const TUNE_EVERY: usize = 10;

#[derive(Debug, Clone)]
pub struct GibbsChain {
    pub beta: f64,
    pub potential: Potential,
    pub seed: u64,
    /// Standard deviation of the Gaussian proposal.
    pub step: f64,
    pub proposed: u64,
    pub accepted: u64,
    d: usize,
    pos: Vec<f64>,
    /// `1/|x_i − x_j|²` in 2D, `1/|x_i − x_j|` in 3D; zero on the diagonal.
    cache: Vec<f64>,
    energy: f64,
    rng: ChaCha8Rng,
    scratch: Vec<f64>,
}

impl GibbsChain {
    /// A chain started from `n` points drawn uniformly in a ball of the size of
    /// the equilibrium support.
    pub fn new(d: usize, n: usize, beta: f64, potential: Potential, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("need at least one particle"));
        }
        potential.check_confining(d)?;
        let radius = equilibrium_measure_radial(&potential, d, 1.0).map(|m| m.support().1).unwrap_or(1.0);
        let mut rng = stream_rng(seed, u64::MAX);
        let mut points = Vec::with_capacity(n * d);
        for _ in 0..n {
            loop {
                let x: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
                if x.iter().map(|v| v * v).sum::<f64>() < 1.0 {
                    points.extend(x.iter().map(|v| v * radius));
                    break;
                }
            }
        }
        Self::from_config(ParticleConfiguration::new(d, points)?, beta, potential, seed)
    }

    pub fn from_config(cfg: ParticleConfiguration, beta: f64, potential: Potential, seed: u64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::domain(format!("β = {beta} must be positive")));
        }
        potential.check_confining(cfg.d)?;
        let energy = hamiltonian(&cfg, &potential)?;
        let (d, n) = (cfg.d, cfg.n());
        let mut cache = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let r2: f64 = (0..d).map(|k| (cfg.points[i * d + k] - cfg.points[j * d + k]).powi(2)).sum();
                    cache[i * n + j] = if d == 2 { 1.0 / r2 } else { 1.0 / r2.sqrt() };
                }
            }
        }
        let radius = cfg.radii().fold(0.0, f64::max).max(1e-3);
        Ok(GibbsChain {
            beta,
            potential,
            seed,
            step: radius / (n as f64).powf(1.0 / d as f64),
            proposed: 0,
            accepted: 0,
            d,
            pos: cfg.points,
            cache,
            energy,
            rng: stream_rng(seed, 0),
            scratch: vec![0.0; n],
        })
    }

    pub fn n(&self) -> usize {
        self.pos.len() / self.d
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Current `H_n`, tracked incrementally.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn positions(&self) -> &[f64] {
        &self.pos
    }

    pub fn config(&self) -> ParticleConfiguration {
        ParticleConfiguration { d: self.d, points: self.pos.clone() }
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    /// `H_n(x with x_i → y) − H_n(x)`; fills the scratch row with the new cache values.
    fn delta_energy(&mut self, i: usize, y: &[f64]) -> f64 {
        let (d, n) = (self.d, self.n());
        let xi = &self.pos[i * d..(i + 1) * d];
        let one_body = n as f64 * (self.potential.eval(y) - self.potential.eval(xi));
        let row = &self.cache[i * n..(i + 1) * n];
        let pos = &self.pos;
        let scratch = &mut self.scratch;
        if d == 2 {
            // Σ_j −log|y − x_j| + log|x_i − x_j| = −½ log Π_j |y − x_j|²/|x_i − x_j|²
            let mut log_sum = 0.0;
            let mut prod = 1.0f64;
            for j in 0..n {
                if j == i {
                    scratch[j] = 0.0;
                    continue;
                }
                let (dx, dy) = (y[0] - pos[2 * j], y[1] - pos[2 * j + 1]);
                let r2 = dx * dx + dy * dy;
                scratch[j] = r2;
                prod *= r2 * row[j];
                if j % 8 == 7 && !(1e-150..1e150).contains(&prod) {
                    log_sum += prod.ln();
                    prod = 1.0;
                }
            }
            log_sum += prod.ln();
            if !log_sum.is_finite() {
                log_sum = (0..n).filter(|&j| j != i).map(|j| (scratch[j] * row[j]).ln()).sum();
            }
            one_body - log_sum
        } else {
            let mut s = 0.0;
            for j in 0..n {
                if j == i {
                    scratch[j] = 0.0;
                    continue;
                }
                let r2: f64 = (0..3).map(|k| (y[k] - pos[3 * j + k]).powi(2)).sum();
                let inv = 1.0 / r2.sqrt();
                scratch[j] = inv;
                s += inv - row[j];
            }
            one_body + 2.0 * s
        }
    }

    /// `log` of the Metropolis ratio for moving particle `i` to `y`.
    pub fn log_acceptance(&mut self, i: usize, y: &[f64]) -> f64 {
        -0.5 * self.beta * self.delta_energy(i, y)
    }

    fn commit(&mut self, i: usize, y: &[f64], de: f64) {
        let (d, n) = (self.d, self.n());
        self.pos[i * d..(i + 1) * d].copy_from_slice(y);
        for j in 0..n {
            if j == i {
                continue;
            }
            let v = if d == 2 { 1.0 / self.scratch[j] } else { self.scratch[j] };
            self.cache[i * n + j] = v;
            self.cache[j * n + i] = v;
        }
        self.energy += de;
    }

    /// One proposal for each particle in index order.
    pub fn sweep(&mut self) {
        let (d, n) = (self.d, self.n());
        let mut y = [0.0; 3];
        for i in 0..n {
            for k in 0..d {
                let z: f64 = self.rng.sample(StandardNormal);
                y[k] = self.pos[i * d + k] + self.step * z;
            }
            let de = self.delta_energy(i, &y[..d]);
            let log_a = -0.5 * self.beta * de;
            self.proposed += 1;
            let u: f64 = self.rng.random();
            if log_a >= 0.0 || u.ln() < log_a {
                self.accepted += 1;
                self.commit(i, &y[..d], de);
            }
        }
    }

    /// Sweeps with the step tuned towards 30–50% acceptance; counters are reset afterwards.
    pub fn warm_up(&mut self, sweeps: usize) {
        let mut done = 0;
        while done < sweeps {
            let (p0, a0) = (self.proposed, self.accepted);
            let block = TUNE_EVERY.min(sweeps - done);
            for _ in 0..block {
                self.sweep();
            }
            done += block;
            let rate = (self.accepted - a0) as f64 / (self.proposed - p0).max(1) as f64;
            if rate < 0.3 {
                self.step *= 0.8;
            } else if rate > 0.5 {
                self.step *= 1.25;
            }
        }
        self.proposed = 0;
        self.accepted = 0;
    }

    /// Recomputes `H_n` from scratch and returns the accumulated drift.
    pub fn resync_energy(&mut self) -> f64 {
        let exact = hamiltonian(&self.config(), &self.potential).unwrap_or(self.energy);
        let drift = self.energy - exact;
        self.energy = exact;
        drift
    }
}

/// Thinned output of one or several chains.
#[derive(Debug, Clone, Default)]
pub struct ChainSamples {
    /// `count × n × d` coordinates, sample after sample.
    pub points: Vec<f64>,
    pub energies: Vec<f64>,
}

/// Runs `sweeps` sweeps and keeps every `thin`-th state.
pub fn metropolis_chain(chain: &mut GibbsChain, sweeps: usize, thin: usize) -> ChainSamples {
    let thin = thin.max(1);
    let mut out = ChainSamples::default();
    for s in 1..=sweeps {
        chain.sweep();
        if s % thin == 0 {
            out.points.extend_from_slice(chain.positions());
            out.energies.push(chain.energy());
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerOptions {
    /// Production sweeps summed over chains.
    pub sweeps: usize,
    /// Warm-up sweeps per chain.
    pub warmup: usize,
    pub thin: usize,
    pub chains: usize,
    pub seed: u64,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        SamplerOptions { sweeps: 20_000, warmup: 2_000, thin: 10, chains: 4, seed: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct ChainSummary {
    pub d: usize,
    pub n: usize,
    pub beta: f64,
    pub samples: ChainSamples,
    pub acceptance: f64,
    pub steps: Vec<f64>,
    pub sweeps_per_chain: usize,
}

impl ChainSummary {
    pub fn count(&self) -> usize {
        self.samples.energies.len()
    }

    pub fn config(&self, k: usize) -> ParticleConfiguration {
        let m = self.n * self.d;
        ParticleConfiguration { d: self.d, points: self.samples.points[k * m..(k + 1) * m].to_vec() }
    }

    /// Radii of all sampled points, pooled.
    pub fn radii(&self) -> Vec<f64> {
        self.samples.points.chunks(self.d).map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt()).collect()
    }

    pub fn energy_mean(&self) -> f64 {
        let e = &self.samples.energies;
        e.iter().sum::<f64>() / e.len().max(1) as f64
    }

    pub fn energy_variance(&self) -> f64 {
        let e = &self.samples.energies;
        if e.len() < 2 {
            return 0.0;
        }
        let m = self.energy_mean();
        e.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (e.len() - 1) as f64
    }
}

/// Independent chains seeded by `stream_seed(opts.seed, k)`, run in parallel
/// and concatenated in chain order, so the result does not depend on the
/// number of threads.
pub fn run_chains(d: usize, n: usize, beta: f64, potential: Potential, opts: &SamplerOptions) -> Result<ChainSummary> {
    potential.check_confining(d)?;
    let chains = opts.chains.max(1);
    let per_chain = opts.sweeps.div_ceil(chains);
    let runs: Vec<Result<(ChainSamples, u64, u64, f64)>> = (0..chains as u64)
        .into_par_iter()
        .map(|k| {
            let mut chain = GibbsChain::new(d, n, beta, potential, stream_seed(opts.seed, k))?;
            chain.warm_up(opts.warmup);
            let s = metropolis_chain(&mut chain, per_chain, opts.thin);
            Ok((s, chain.proposed, chain.accepted, chain.step))
        })
        .collect();
    let mut samples = ChainSamples::default();
    let (mut proposed, mut accepted) = (0u64, 0u64);
    let mut steps = Vec::with_capacity(chains);
    for r in runs {
        let (s, p, a, step) = r?;
        samples.points.extend(s.points);
        samples.energies.extend(s.energies);
        proposed += p;
        accepted += a;
        steps.push(step);
    }
    Ok(ChainSummary {
        d,
        n,
        beta,
        samples,
        acceptance: accepted as f64 / proposed.max(1) as f64,
        steps,
        sweeps_per_chain: per_chain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detailed_balance_identity() {
        for d in [2, 3] {
            let mut chain = GibbsChain::new(d, 12, 3.0, Potential::harmonic(), 4).unwrap();
            let x = chain.config();
            let i = 5;
            let y: Vec<f64> = x.point(i).iter().map(|v| v + 0.13).collect();
            let mut moved = x.points.clone();
            moved[i * d..(i + 1) * d].copy_from_slice(&y);
            let ycfg = ParticleConfiguration::new(d, moved).unwrap();
            let forward = chain.log_acceptance(i, &y).min(0.0).exp();
            let mut back = GibbsChain::from_config(ycfg.clone(), 3.0, Potential::harmonic(), 4).unwrap();
            let backward = back.log_acceptance(i, x.point(i)).min(0.0).exp();
            let h = |c: &ParticleConfiguration| hamiltonian(c, &Potential::harmonic()).unwrap();
            let ratio = (-1.5 * (h(&ycfg) - h(&x))).exp();
            assert!((forward / backward / ratio - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn incremental_energy_tracks_exact_value() {
        for d in [2, 3] {
            let mut chain = GibbsChain::new(d, 30, 2.0, Potential::harmonic(), 9).unwrap();
            chain.warm_up(50);
            for _ in 0..50 {
                chain.sweep();
            }
            assert!(chain.acceptance_rate() > 0.2 && chain.acceptance_rate() < 0.6);
            let e = chain.energy();
            assert!(chain.resync_energy().abs() < 1e-9 * e.abs().max(1.0));
        }
    }

    #[test]
    fn reproducible_from_seed() {
        let opts = SamplerOptions { sweeps: 200, warmup: 20, thin: 5, chains: 3, seed: 42 };
        let a = run_chains(2, 10, 2.0, Potential::harmonic(), &opts).unwrap();
        let b = run_chains(2, 10, 2.0, Potential::harmonic(), &opts).unwrap();
        assert_eq!(a.samples.points, b.samples.points);
        assert_eq!(a.count(), 3 * 13);
        let c = run_chains(2, 10, 2.0, Potential::harmonic(), &SamplerOptions { seed: 43, ..opts }).unwrap();
        assert_ne!(a.samples.points, c.samples.points);
    }

    #[test]
    fn rejects_non_confining() {
        assert!(GibbsChain::new(2, 3, 1.0, Potential::Zero, 0).is_err());
        assert!(run_chains(3, 3, 1.0, Potential::Power { s: 2.0, scale: -1.0 }, &SamplerOptions::default()).is_err());
    }

    #[test]
    fn single_particle_law() {
        // n = 1, V = r², β = 4: density ∝ e^{−2r²}, radial CDF 1 − e^{−2r²}.
        let opts = SamplerOptions { sweeps: 100_000, warmup: 500, thin: 1, chains: 1, seed: 1 };
        let s = run_chains(2, 1, 4.0, Potential::harmonic(), &opts).unwrap();
        let mut r = s.radii();
        r.sort_by(f64::total_cmp);
        let n = r.len() as f64;
        let ks = r
            .iter()
            .enumerate()
            .map(|(k, &x)| {
                let f = 1.0 - (-2.0 * x * x).exp();
                (f - k as f64 / n).abs().max((f - (k + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.05, "KS = {ks}");
    }
}
