//! Simulation and numerical verification tools for balanced random walks in
//! i.i.d. random environments on `Z^d`.
//!
//! The crate is organised by subsystem:
//!
//! * [`env`]: site laws, sampled environments and their file format;
//! * [`walk`]: quenched walks, rescaled times, covariance and `T_1` statistics;
//! * [`dirichlet`]: lattice domains, Dirichlet solves, harmonic measure,
//!   exposed points and the maximum-principle check;
//! * [`homog`]: Σ-harmonic polynomials, Brownian exit laws and the
//!   homogenization experiments;
//! * [`perc`]: the directed percolation graph, sinks, distances and 2D stairs;
//! * [`harnack`]: Harnack ratios, oscillation constants and maximal couplings;
//! * [`experiment`]: configuration and orchestration used by the `rwre` CLI.

pub mod error;
pub mod lattice;
pub mod rng;
pub mod stats;
pub mod env;
pub mod walk;
pub mod dirichlet;
pub mod homog;
pub mod perc;
pub mod harnack;
pub mod experiment;

pub use error::{Error, Result};
pub use lattice::LatticeBox;
