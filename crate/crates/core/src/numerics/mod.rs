//! Shared numerical building blocks: quadrature, special functions, Chebyshev
//! collocation, banded solvers and deterministic seeding.

pub mod chebyshev;
pub mod linalg;
pub mod optimize;
pub mod quadrature;
pub mod rng;
pub mod special;
