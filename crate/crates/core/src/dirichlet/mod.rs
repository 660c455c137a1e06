//! Lattice domains, the generator `L_ω`, Dirichlet problems, harmonic
//! measure and the rescaled maximum principle.

mod domain;
mod exposed;
pub mod lp;
mod maxprin;
mod measure;
mod solver;

pub use domain::{widened_boundary, LatticeDomain, SiteRole};
pub use exposed::{exposed_points, ExposedSet, ExposedSite, EXPOSED_SLACK};
pub use maxprin::{check_max_principle, rescaled_generator, MaxPrincipleCheck, MaxPrincipleOptions, RescaledGenerator};
pub use measure::{harmonic_measure, ExitDistribution, ExitTargets};
pub use solver::{
    apply_generator, boundary_values, solve_dirichlet, BandLu, DirichletOperator, DirichletSystem, HarmonicSolution,
    SolveOptions, SolverKind, SolverTag, BAND_ENTRY_CAP, DEFAULT_TOL, DIRECT_CAP,
};
