use super::poly::SigmaHarmonicFunction;
use super::sphere::{bm_exit_distribution, bm_exit_probability, direction, CellSet, SpherePartition, WosOptions};
use crate::dirichlet::{harmonic_measure, solve_dirichlet, ExitTargets, LatticeDomain, SolveOptions};
use crate::env::Environment;
use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomogenizationResult {
    pub radius: f64,
    pub law: String,
    pub seed: u64,
    pub f_kind: String,
    /// `max_{x ∈ É_R} |F_R(x) - G_{R,ω}(x)|`.
    pub error: f64,
    pub residual: f64,
    pub sigma: Vec<f64>,
}

/// Solves `L_ω G = 0` on `É_R` with `G = F_R` on `∂É_R` and compares with `F_R`.
pub fn homogenization_error(
    env: &Environment,
    f: &SigmaHarmonicFunction,
    radius: f64,
    opts: SolveOptions,
) -> Result<HomogenizationResult> {
    if f.dim != env.dim() {
        return Err(Error::Argument("polynomial and environment dimensions differ".into()));
    }
    let dom = LatticeDomain::discrete_ball(radius, &vec![0.0; env.dim()])?;
    let g: Vec<f64> = dom.boundary_sites().iter().map(|x| f.eval_scaled(x, radius)).collect();
    let sol = solve_dirichlet(env, &dom, &g, opts)?;
    let error = dom
        .interior_sites()
        .iter()
        .zip(&sol.interior)
        .map(|(x, u)| (f.eval_scaled(x, radius) - u).abs())
        .fold(0.0, f64::max);
    Ok(HomogenizationResult {
        radius,
        law: env.law_name().to_string(),
        seed: env.seed(),
        f_kind: f.kind.label(),
        error,
        residual: sol.residual,
        sigma: f.sigma.clone(),
    })
}

#[derive(Debug, Clone)]
pub enum ExitTargetSet {
    Partition(SpherePartition),
    Single(CellSet),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExitLawRow {
    pub cell_index: usize,
    pub quenched: f64,
    pub continuum: f64,
    pub abs_diff: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExitLawResult {
    /// Per-cell table at the source attaining the maximum.
    pub rows: Vec<ExitLawRow>,
    pub max_discrepancy: f64,
    pub worst_source: Vec<i64>,
    pub n_sources: usize,
    /// Largest `|Σ_c quenched_c - 1|` over sources.
    pub quenched_sum_error: f64,
    /// Largest `|Σ_c continuum_c - 1|` over sources.
    pub continuum_sum_error: f64,
}

/// Compares the quenched exit law from `B_R^dis` through `Ã_R` with the
/// Brownian exit law through `A`, over sources in `B_{rR}^dis` (the origin
/// alone when `rR < 1`).
pub fn exit_law_discrepancy(
    env: &Environment,
    sigma: &[f64],
    radius: f64,
    r: f64,
    targets: &ExitTargetSet,
    wos: &WosOptions,
) -> Result<ExitLawResult> {
    let d = env.dim();
    if sigma.len() != d {
        return Err(Error::Argument("Σ and environment dimensions differ".into()));
    }
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Argument(format!("r must lie in [0, 1), got {r}")));
    }
    let origin = vec![0.0; d];
    let dom = LatticeDomain::discrete_ball(radius, &origin)?;
    let inner = r * radius;
    let sources: Vec<Vec<i64>> = if inner >= 1.0 {
        let half = inner.ceil() as i64;
        crate::LatticeBox::centered(d, half)?
            .iter_coords()
            .filter(|x| (crate::lattice::norm2_sq(x) as f64) < inner * inner)
            .collect()
    } else {
        vec![vec![0; d]]
    };
    let bsites = dom.boundary_sites();
    let (labels, n_cells, reported): (Vec<usize>, usize, usize) = match targets {
        ExitTargetSet::Partition(p) => {
            if p.dim != d {
                return Err(Error::Argument("partition dimension differs from the environment".into()));
            }
            (bsites.iter().map(|x| p.cell_of(&direction(x))).collect(), p.n_cells(), p.n_cells())
        }
        ExitTargetSet::Single(a) => (bsites.iter().map(|x| usize::from(!a.contains(&direction(x)))).collect(), 2, 1),
    };
    let quenched = harmonic_measure(
        env,
        &dom,
        &sources,
        ExitTargets::Cells { labels: &labels, n_cells },
        SolveOptions::default(),
    )?;
    let mut best: Option<(f64, usize, Vec<ExitLawRow>)> = None;
    let mut qsum: f64 = 0.0;
    let mut csum: f64 = 0.0;
    for (si, x) in sources.iter().enumerate() {
        let start: Vec<f64> = x.iter().map(|&v| v as f64 / radius).collect();
        let opts = WosOptions {
            seed: crate::rng::derive_seed(wos.seed, si as u64),
            ..*wos
        };
        let continuum: Vec<(f64, f64)> = match targets {
            ExitTargetSet::Partition(p) => bm_exit_distribution(sigma, p, &start, &opts)?
                .into_iter()
                .map(|e| (e.p, e.stderr))
                .collect(),
            ExitTargetSet::Single(a) => {
                let e = bm_exit_probability(sigma, a, &start, &opts)?;
                vec![(e.p, e.stderr), (1.0 - e.p, e.stderr)]
            }
        };
        let row = quenched.row(si);
        qsum = qsum.max((row.iter().sum::<f64>() - 1.0).abs());
        csum = csum.max((continuum.iter().map(|c| c.0).sum::<f64>() - 1.0).abs());
        let rows: Vec<ExitLawRow> = (0..reported)
            .map(|c| ExitLawRow {
                cell_index: c,
                quenched: row[c],
                continuum: continuum[c].0,
                abs_diff: (row[c] - continuum[c].0).abs(),
                stderr: continuum[c].1,
            })
            .collect();
        let worst = rows.iter().map(|r| r.abs_diff).fold(0.0, f64::max);
        if best.as_ref().is_none_or(|b| worst > b.0) {
            best = Some((worst, si, rows));
        }
    }
    let (max_discrepancy, si, rows) = best.expect("at least one source");
    Ok(ExitLawResult {
        rows,
        max_discrepancy,
        worst_source: sources[si].clone(),
        n_sources: sources.len(),
        quenched_sum_error: qsum,
        continuum_sum_error: csum,
    })
}
