//! First Dirichlet eigenpair of the complex Monge-Ampère operator on balls
//! in `C^n`, computed by inverse iteration and checked against independent
//! oracles.

pub mod cli;
pub mod dirichlet_solver;
pub mod eigen_iteration;
pub mod error;
pub mod geometry;
pub mod oracles;
pub mod pluripotential;

pub use error::{Error, Result};
