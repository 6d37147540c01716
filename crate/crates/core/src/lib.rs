//! Desk-scale numerics for mean-field variational problems.
//!
//! The crate is organised by physical problem:
//!
//! * [`tf_vortex`]: Thomas-Fermi profile of a rotating 2D condensate, the vortex
//!   cost function, the first critical speed and the limiting vortex density.
//! * [`variational_1d`]: the half-line Ginzburg-Landau problems of surface
//!   superconductivity and the zero-energy scattering length.
//! * [`coulomb_gas`]: mean-field Coulomb gases, equilibrium measures, Metropolis
//!   sampling of Gibbs states and the Laughlin plasma analogy.
//! * [`jellium`]: renormalized energy of periodic point configurations.
//! * [`definetti`]: the finite-dimensional quantitative quantum de Finetti construction.
//! * [`anyon`]: the average-field functional for almost-bosonic extended anyons.
//! * [`cli`]: the `meanfield-lab` command line front-end.

pub mod anyon;
pub mod cli;
pub mod coulomb_gas;
pub mod definetti;
mod error;
pub mod jellium;
pub mod numerics;
pub mod tf_vortex;
pub mod variational_1d;

pub use error::{Error, Result};
