//! Σ-harmonic polynomials, Brownian exit laws from the unit ball, and the
//! comparisons of discrete solutions and exit laws against their continuum
//! limits.

mod experiments;
mod poly;
mod sphere;

pub use experiments::{exit_law_discrepancy, homogenization_error, ExitLawResult, ExitLawRow, ExitTargetSet, HomogenizationResult};
pub use poly::{PolyKind, SigmaHarmonicFunction, TRACE_TOL};
pub use sphere::{bm_exit_distribution, bm_exit_probability, direction, BmExit, CellSet, SpherePartition, WosOptions};

/// `Σ` used to build reference functions: the symmetry-exact value when the
/// law forces it, otherwise the supplied estimate.
pub fn reference_sigma(law: &crate::env::EnvironmentLaw, estimate: Option<&[f64]>) -> Option<(Vec<f64>, &'static str)> {
    law.symmetric_sigma()
        .map(|s| (s, "symmetry"))
        .or_else(|| estimate.map(|e| (e.to_vec(), "estimate")))
}

#[cfg(test)]
mod tests;
