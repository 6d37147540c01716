//! Bath-tub energies under a density cap, and the quasi-hole degree that
//! minimizes a rotating trap energy.
//!
//!     cargo run --release --example bathtub

use std::f64::consts::PI;

use meanfield_lab::coulomb_gas::{bathtub, optimal_quasihole_degree, radial_cells, Potential};

fn main() -> meanfield_lab::Result<()> {
    for s in [2.0, 4.0] {
        let v = Potential::Power { s, scale: 1.0 };
        for cap in [1.0 / (2.0 * PI), 1.0 / PI] {
            let cells = radial_cells(&v, 2.0, 4000);
            let res = bathtub(&cells, cap, 1.0)?;
            let r = (1.0 / (PI * cap)).sqrt();
            let exact = 2.0 * PI * cap * r.powf(s + 2.0) / (s + 2.0);
            println!("V = r^{s}, cap = {cap:.6}: E = {:.12} (closed form {exact:.12}), level {:.6}", res.energy, res.level);
        }
    }
    let mexican = Potential::LogPerturbed { gamma: 0.5, scale: 1.0 };
    let res = bathtub(&radial_cells(&mexican, 3.0, 6000), 1.0 / (2.0 * PI), 1.0)?;
    println!("V = r² − log r: E = {:.8}", res.energy);
    for omega in [-100.0, -300.0, -1000.0] {
        println!("ω = {omega}: m_opt = {}", optimal_quasihole_degree(omega, 1.0, 100)?);
    }
    Ok(())
}
