//! Ground states of the average-field functional in a harmonic trap as the
//! statistics parameter β grows.
//!
//!     cargo run --release --example anyon_average_field -- [grid]

use meanfield_lab::anyon::{minimize_af, AfParams, Grid, MinimizeOptions, TrapPotential};

fn main() -> meanfield_lab::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(96, |a| a.parse().expect("grid size"));
    let opts = MinimizeOptions { restarts: 2, ..Default::default() };
    println!("{:>6} {:>14} {:>8} {:>12} {:>12}", "β", "E_af", "iters", "grad check", "anisotropy");
    for beta in [0.0, 0.5, 1.0, 2.0, 4.0] {
        let p = AfParams { beta, radius: 0.25, potential: TrapPotential::Harmonic };
        let m = minimize_af(&p, Grid::new(n, p.default_box())?, &opts)?;
        let spread = m.u.angular_spread(&[0.5, 1.0, 1.5]);
        println!("{beta:>6} {:>14.8} {:>8} {:>12.2e} {spread:>12.2e}", m.energy, m.iterations, m.gradient_residual);
    }
    Ok(())
}
