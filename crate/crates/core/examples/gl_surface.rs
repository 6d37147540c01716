//! Half-line Ginzburg-Landau problems of surface superconductivity: Θ₀, the
//! flat energy across the surface regime and the curvature constants.
//!
//!     cargo run --release --example gl_surface

use meanfield_lab::variational_1d::{curvature_constants, minimize_gl1d, theta0, Gl1dGrid, GlParams, HalfLineGrid};

fn main() -> meanfield_lab::Result<()> {
    let th = theta0(HalfLineGrid::default())?;
    println!("Θ₀ = {:.10} at α₀ = {:.8}, Θ₀⁻¹ = {:.6}", th.theta0, th.alpha0, 1.0 / th.theta0);
    println!();
    println!("{:>6} {:>14} {:>10} {:>12} {:>12} {:>10}", "b", "E1D_0", "α", "C1", "C2", "identity");
    let grid = Gl1dGrid::default();
    for b in [1.05, 1.2, 1.4, 1.55, 1.65] {
        let c = curvature_constants(b, grid)?;
        println!("{b:>6.2} {:>14.6e} {:>10.6} {:>12.6e} {:>12.6e} {:>10.1e}", c.e0, c.alpha0, c.c1, c.c2, c.c1_identity_error());
    }
    println!();
    let b = 1.4;
    let flat = minimize_gl1d(&GlParams::flat(b), grid)?.energy;
    for k in [0.5, 1.0, 2.0] {
        let p = GlParams { k, ..GlParams::flat(b) };
        let e = minimize_gl1d(&p, grid)?.energy;
        println!("b = {b}, k = {k}: E1D_k = {e:.8e}, (E1D_k − E1D_0)/ε = {:.6e}", (e - flat) / p.eps);
    }
    Ok(())
}
