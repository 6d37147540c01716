//! Average-field functional of almost-bosonic extended anyons,
//!
//! `E^af[u] = ∫ |(∇ + iβ A[|u|²]) u|² + V|u|²`, `A[ρ] = ∇^⊥ w_R ∗ ρ`,
//!
//! discretized on a periodic square grid: spectral derivatives for `u`,
//! free-space FFT convolutions for `A`.

mod field;
mod functional;

pub use field::{gauge_field, smeared_log, smeared_perp_gradient, GaugeField2D, GaugeSolver, Grid, GridField2D};
pub use functional::{
    af_energy, gradient_check, minimize_af, AfFunctional, AfMinimum, AfParams, MinimizeOptions, TrapPotential,
};
