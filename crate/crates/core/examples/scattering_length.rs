//! Zero-energy scattering lengths: hard sphere, soft balls against their
//! closed form, and the bound 8πa ≤ ∫w for a random step potential.
//!
//!     cargo run --release --example scattering_length

use std::f64::consts::PI;

use meanfield_lab::variational_1d::{scattering_length, soft_ball_length, ScatteringPotential};

fn main() -> meanfield_lab::Result<()> {
    println!("hard sphere R₀ = 1: a = {}", scattering_length(&ScatteringPotential::HardSphere, 1.0)?.a);
    for v0 in [0.1, 1.0, 10.0, 100.0, 1e4] {
        let w = ScatteringPotential::soft_ball(v0);
        let res = scattering_length(&w, 1.0)?;
        println!(
            "soft ball V₀ = {v0:>7}: a = {:.12} (closed form {:.12}), 8πa/∫w = {:.6}",
            res.a,
            soft_ball_length(v0, 1.0),
            8.0 * PI * res.a / w.integral(1.0)
        );
    }
    let steps = ScatteringPotential::Steps(vec![5.0, 0.5, 3.0, 0.0, 1.0]);
    let res = scattering_length(&steps, 2.0)?;
    println!("steps: 8πa = {:.8} ≤ ∫w = {:.8}", 8.0 * PI * res.a, steps.integral(2.0));
    Ok(())
}
