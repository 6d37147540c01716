//! One-dimensional variational problems.
//!
//! * [`theta0`]: the de Gennes constant `Θ₀`, ground energy of the shifted
//!   harmonic oscillator on the half-line minimized over the shift.
//! * [`gl1d`]: the reduced Ginzburg-Landau functionals of surface
//!   superconductivity, with and without curvature, and the curvature constants.
//! * [`scattering`]: the zero-energy scattering length of a radial potential.
//!
//! Half-line problems are discretized by Chebyshev collocation on `[0, T]`
//! with Clenshaw-Curtis weights: natural (Neumann) condition at 0, Dirichlet at `T`.

pub mod gl1d;
pub mod scattering;
pub mod theta0;

pub use gl1d::{
    correction_energy, curvature_constants, minimize_gl1d, minimize_gl1d_on, CurvatureConstants, Gl1dGrid,
    Gl1dMinimum, GlParams, Profile1D,
};
pub use scattering::{scattering_length, soft_ball_length, ScatteringPotential, ScatteringResult};
pub use theta0::{lowest_eigenvalue, theta0, HalfLineGrid, Theta0};
