//! Metropolis sampling of the 2D log-gas at β = 4 and comparison of the
//! smoothed empirical measure with the circular law.
//!
//!     cargo run --release --example circular_law -- [n] [sweeps]

use std::time::Instant;

use meanfield_lab::coulomb_gas::{
    bl_distance, default_bandwidth, equilibrium_measure_radial, radial_w1_distance, run_chains, Potential,
    RadialHistogram, SamplerOptions,
};

fn main() -> meanfield_lab::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let n = args.next().unwrap_or(100);
    let sweeps = args.next().unwrap_or(1_000_000);

    let v = Potential::harmonic();
    let mu0 = equilibrium_measure_radial(&v, 2, 1.0)?;
    let opts = SamplerOptions { sweeps, warmup: 2_000, thin: 100, chains: 4, seed: 2024 };
    let start = Instant::now();
    let run = run_chains(2, n, 4.0, v, &opts)?;
    println!("n = {n}, {} sweeps in {:.1?}, acceptance {:.3}", sweeps, start.elapsed(), run.acceptance);

    let h = default_bandwidth(n);
    let hist = RadialHistogram::from_radii(&run.radii(), 2, 3.0, 600).smoothed(h);
    println!("bandwidth {h:.3}");
    println!("bounded-Lipschitz distance {:.4}", bl_distance(&hist, &mu0));
    println!("W1 distance               {:.4}", radial_w1_distance(&hist, &mu0));
    println!("energy per n²: mean {:.6}", run.energy_mean() / (n * n) as f64);
    Ok(())
}
