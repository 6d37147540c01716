//! Quantitative quantum de Finetti: trace-norm distance between the reduced
//! density matrices of random bosonic states and the moments of their lower
//! symbol, against the bound 2k(d+2k)/N.
//!
//!     cargo run --release --example de_finetti -- [d]

use meanfield_lab::definetti::{definetti_error, SymmetricState};

fn main() -> meanfield_lab::Result<()> {
    let d: usize = std::env::args().nth(1).map_or(2, |a| a.parse().expect("dimension"));
    println!("{:>4} {:>3} {:>14} {:>14} {:>8}", "N", "k", "mean error", "max error", "bound");
    for k in [1, 2] {
        for n in [4, 8, 16, 32] {
            let errs: Vec<f64> = (0..20)
                .map(|seed| Ok(definetti_error(&SymmetricState::random_mixed(n, d, seed)?, k)?.trace_distance))
                .collect::<meanfield_lab::Result<_>>()?;
            let mean = errs.iter().sum::<f64>() / errs.len() as f64;
            let max = errs.iter().cloned().fold(0.0, f64::max);
            let bound = 2.0 * k as f64 * (d + 2 * k) as f64 / n as f64;
            println!("{n:>4} {k:>3} {mean:>14.6e} {max:>14.6e} {bound:>8.4}");
        }
    }
    Ok(())
}
