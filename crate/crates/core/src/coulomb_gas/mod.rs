//! Mean-field Coulomb gases in `d = 2, 3`.
//!
//! Conventions: the Hamiltonian is
//! `H_n = Σ_{i≠j} w(x_i − x_j) + n Σ_i V(x_i)` with the sum over *ordered*
//! pairs (each unordered pair counted twice), `w = −log|x|` in 2D and `1/|x|`
//! in 3D, and the Gibbs state is `∝ exp(−(β/2) H_n)`.
//!
//! With `−Δw = c_d δ` (`c₂ = 2π`, `c₃ = 4π`), the minimizer of
//! `∫V μ + c ∬ w μ μ` has density `ΔV / (2 c c_d)` on its support.

mod bathtub;
mod equilibrium;
mod hamiltonian;
mod laughlin;
mod metropolis;
mod observables;
mod quasihole;

pub use bathtub::{bathtub, optimal_quasihole_degree, radial_cells, BathtubResult, GridCells};
pub use equilibrium::{equilibrium_measure_radial, shell_energy, EquilibriumMeasure, RadialLaw};
pub use hamiltonian::{hamiltonian, Potential, ParticleConfiguration};
pub use laughlin::{laughlin_sampler, LaughlinPlasmaSpec, LaughlinRun};
pub use metropolis::{metropolis_chain, run_chains, ChainSamples, ChainSummary, GibbsChain, SamplerOptions};
pub use observables::{
    annulus_radii, bl_distance, charge_deviation, default_bandwidth, excess_kurtosis, radial_w1_distance,
    RadialHistogram,
};
pub use quasihole::{quasihole_mf_density, QuasiholeGrid};
