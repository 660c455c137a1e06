use crate::dirichlet::{harmonic_measure, DirichletSystem, ExitTargets, LatticeDomain, SolveOptions};
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::lattice::ball_sites;
use serde::Serialize;

/// Values at or below this count as a zero infimum.
pub const ZERO_INF_TOL: f64 = 1e-10;

/// `(1 + ρ)^d / (1 - ρ)^d`.
pub fn classical_harnack_constant(d: usize, rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Argument(format!("ρ must lie in (0, 1), got {rho}")));
    }
    Ok(((1.0 + rho) / (1.0 - rho)).powi(d as i32))
}

#[derive(Debug, Clone)]
pub enum BoundaryFamily {
    /// Indicators of single boundary sites, swept over `∂B_{2R}`.
    PointMasses,
    /// Explicit nonnegative data in boundary ordinal order.
    Custom(Vec<Vec<f64>>),
}

impl BoundaryFamily {
    fn label(&self) -> &'static str {
        match self {
            BoundaryFamily::PointMasses => "point-masses",
            BoundaryFamily::Custom(_) => "custom",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarnackMeasurement {
    pub radius: f64,
    pub law: String,
    pub seed: u64,
    pub family: String,
    pub ratio: f64,
    /// Datum attaining the ratio.
    pub datum: usize,
    pub sup_site: Vec<i64>,
    pub sup_value: f64,
    pub inf_site: Vec<i64>,
    pub inf_value: f64,
    pub data: usize,
    /// Data whose solution vanishes somewhere on `B_R`; excluded from the ratio.
    pub zero_infimum: Vec<usize>,
    pub zero_inf_frac: f64,
    /// Isotropic reference `(3/2)^d / (1/2)^d`.
    pub classical_ref: f64,
}

/// Solves on the closed ball `B_{2R}` for each datum and reports the largest
/// `sup_{B_R} f / inf_{B_R} f`, with `B_R` the closed ball.
pub fn harnack_ratio(env: &Environment, radius: f64, family: &BoundaryFamily, tol: f64) -> Result<HarnackMeasurement> {
    let d = env.dim();
    let origin = vec![0.0; d];
    let dom = LatticeDomain::closed_ball(2.0 * radius, &origin)?;
    let inner = ball_sites(&vec![0; d], radius);
    // columns[c][r] = f_c(inner[r])
    let columns: Vec<Vec<f64>> = match family {
        BoundaryFamily::PointMasses => {
            let h = harmonic_measure(env, &dom, &inner, ExitTargets::Sites, SolveOptions::default())?;
            (0..h.n_columns).map(|c| h.matrix.iter().map(|row| row[c]).collect()).collect()
        }
        BoundaryFamily::Custom(data) => {
            for g in data {
                if g.iter().any(|&v| v < 0.0) || g.iter().all(|&v| v == 0.0) {
                    return Err(Error::Argument("boundary data must be nonnegative and not identically zero".into()));
                }
            }
            let system = DirichletSystem::new(env, &dom, SolveOptions::default())?;
            system
                .solve_many(data)?
                .iter()
                .map(|sol| inner.iter().map(|x| sol.value(&dom, x).expect("inner ball is interior")).collect())
                .collect()
        }
    };
    let mut best: Option<(f64, usize, usize, usize)> = None;
    let mut zero_infimum = Vec::new();
    for (c, col) in columns.iter().enumerate() {
        let (mut imax, mut imin) = (0, 0);
        for (r, &v) in col.iter().enumerate() {
            if v > col[imax] {
                imax = r;
            }
            if v < col[imin] {
                imin = r;
            }
        }
        if col[imin] <= tol {
            zero_infimum.push(c);
            continue;
        }
        let ratio = col[imax] / col[imin];
        if best.is_none_or(|b| ratio > b.0) {
            best = Some((ratio, c, imax, imin));
        }
    }
    let (ratio, datum, imax, imin) =
        best.ok_or_else(|| Error::Domain("every boundary datum has zero infimum on the inner ball".into()))?;
    Ok(HarnackMeasurement {
        radius,
        law: env.law_name().to_string(),
        seed: env.seed(),
        family: family.label().to_string(),
        ratio,
        datum,
        sup_site: inner[imax].clone(),
        sup_value: columns[datum][imax],
        inf_site: inner[imin].clone(),
        inf_value: columns[datum][imin],
        data: columns.len(),
        zero_inf_frac: zero_infimum.len() as f64 / columns.len() as f64,
        zero_infimum,
        classical_ref: classical_harnack_constant(d, 0.5)?,
    })
}
