//! Renormalized jellium energies of the standard lattices as η shrinks.
//!
//!     cargo run --release --example jellium_lattices

use meanfield_lab::jellium::{field_energy_eta, scaling_check, PeriodicChargeConfig, SmearedCharge};

fn main() -> meanfield_lab::Result<()> {
    println!("{:>11} {:>7} {:>16}", "lattice", "η", "W_η");
    for name in ["square", "triangular", "cubic", "bcc", "fcc"] {
        let cfg = PeriodicChargeConfig::named(name, 1.0)?;
        for eta in [0.1, 0.05, 0.02] {
            let e = field_energy_eta(&cfg, &SmearedCharge::uniform(eta))?;
            println!("{name:>11} {eta:>7} {:>16.10}", e.w_eta);
        }
    }
    let rep = scaling_check(&PeriodicChargeConfig::triangular(1.0)?, &SmearedCharge::uniform(0.05), 4.0)?;
    println!("density scaling at m = 4: {:.12} vs {:.12}", rep.lhs, rep.rhs);
    Ok(())
}
