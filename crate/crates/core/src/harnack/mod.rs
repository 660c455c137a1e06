//! Empirical Harnack ratios, oscillation constants from total variation of
//! exit laws, and the maximal coupling of two exit-cell laws.

mod coupling;
mod osc;
mod ratio;

pub use coupling::{basic_coupling, CoupledRun, CouplingCells, CouplingOptions, CouplingResult};
pub use osc::{oscillation_constant, total_variation, OscillationMeasurement, SourceSet};
pub use ratio::{classical_harnack_constant, harnack_ratio, BoundaryFamily, HarnackMeasurement, ZERO_INF_TOL};

#[cfg(test)]
mod tests;
