//! Plasma analogy for Laughlin and quasi-hole states: sampled densities
//! against the mean-field annulus and the incompressibility cap `1/(πℓ)`.
//!
//!     cargo run --release --example laughlin_plasma -- [N] [ell] [m] [sweeps]

use meanfield_lab::coulomb_gas::{laughlin_sampler, quasihole_mf_density, LaughlinPlasmaSpec, QuasiholeGrid, SamplerOptions};

fn main() -> meanfield_lab::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let n = args.next().unwrap_or(100);
    let ell = args.next().unwrap_or(2) as u32;
    let m = args.next().unwrap_or(0) as u32;
    let sweeps = args.next().unwrap_or(40_000);

    let spec = LaughlinPlasmaSpec { n, ell, m };
    let opts = SamplerOptions { sweeps, warmup: 2_000, thin: 20, chains: 4, seed: 7 };
    let run = laughlin_sampler(&spec, &opts)?;
    let (r1, r2) = run.annulus_radii();
    let mf = quasihole_mf_density(n, m as u64, ell, &QuasiholeGrid::default())?;
    let (s1, s2) = mf.support();

    println!("N = {n}, ℓ = {ell}, m = {m}: {} samples, acceptance {:.3}", run.summary.count(), run.summary.acceptance);
    println!("max smoothed density × πℓ = {:.4}", run.max_smoothed_density() / run.cap());
    println!("moment annulus   [{r1:.4}, {r2:.4}]");
    println!("mean-field window  [{s1:.4}, {s2:.4}]");
    println!("radial excess kurtosis {:.3}", run.radial_excess_kurtosis());
    println!();
    println!("{:>8} {:>12} {:>12}", "r", "sampled", "mean-field");
    let centers = run.smoothed.centers();
    let dens = run.smoothed.density();
    let stride = (centers.len() / 25).max(1);
    for (r, rho) in centers.iter().zip(&dens).step_by(stride) {
        println!("{r:8.3} {rho:12.5} {:12.5}", mf.density(*r));
    }
    Ok(())
}
