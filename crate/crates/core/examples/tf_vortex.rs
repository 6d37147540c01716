//! Thomas-Fermi profile of a rotating condensate, the first critical speed
//! and the limiting vortex density as the rotation grows.
//!
//!     cargo run --release --example tf_vortex -- [s]

use meanfield_lab::tf_vortex::{critical_speed_by_bisection, first_critical_speed, tf_profile, vortex_density, VortexGrid};

fn main() -> meanfield_lab::Result<()> {
    let s: f64 = std::env::args().nth(1).map_or(2.0, |a| a.parse().expect("trap exponent"));
    let p = tf_profile(s)?;
    let omega1 = first_critical_speed(s)?;
    println!("s = {s}: λ_TF = {:.10}, R_TF = {:.10}", p.lambda_tf, p.r_tf);
    println!("Ω₁ = {omega1:.12} (bisection on H(0): {:.12})", critical_speed_by_bisection(s, 1e-13)?);
    println!();
    println!("{:>8} {:>14} {:>22}", "Ω₀/Ω₁", "support radius", "sup|μ*/2Ω₀ − 1| (80%)");
    for f in [0.99, 1.5, 3.0, 10.0, 50.0] {
        let omega0 = f * omega1;
        let m = vortex_density(&p, omega0, VortexGrid::default())?;
        match (m.support_radius(), m.flatness(omega0, 0.8)) {
            (Some(r), Some(flat)) => println!("{f:>8.2} {r:>14.6} {flat:>22.4}"),
            _ => println!("{f:>8.2} {:>14} {:>22}", "no vortices", "-"),
        }
    }
    Ok(())
}
