use super::osc::total_variation;
use crate::dirichlet::{harmonic_measure, DirichletSystem, ExitTargets, LatticeDomain, SiteRole, SolveOptions};
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::homog::{direction, SpherePartition};
use crate::lattice::{diff, norm2_sq};
use crate::rng::{stream_rng, WalkRng};
use crate::stats::Proportion;
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// How exit sites are grouped before coupling.
#[derive(Debug, Clone)]
pub enum CouplingCells {
    /// Cells of a sphere partition, by direction from the center.
    Partition(SpherePartition),
    /// Every boundary site is its own cell.
    Sites,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingOptions {
    pub replicates: usize,
    pub seed: u64,
    /// Simulate both walks to their exit through the conditioned (Doob) chain
    /// instead of drawing exit sites from the conditional exit law.
    pub trajectories: bool,
}

impl Default for CouplingOptions {
    fn default() -> Self {
        Self {
            replicates: 10_000,
            seed: 0,
            trajectories: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoupledRun {
    pub y_cell: usize,
    pub z_cell: usize,
    pub y_exit: Vec<i64>,
    pub z_exit: Vec<i64>,
    /// Paths and exit times, present when trajectories are simulated.
    pub y_path: Option<Vec<Vec<i64>>>,
    pub z_path: Option<Vec<Vec<i64>>>,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingResult {
    pub success: Proportion,
    /// `TV(D_ω(B, y), D_ω(B, z))` over cells.
    pub tv: f64,
    pub y_law: Vec<f64>,
    pub z_law: Vec<f64>,
    pub runs: Vec<CoupledRun>,
}

impl CouplingResult {
    pub fn success_frequency(&self) -> f64 {
        self.success.p_hat
    }

    /// Empirical exit-cell frequencies of the first (`y`) component.
    pub fn y_cell_counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.y_law.len()];
        for r in &self.runs {
            c[r.y_cell] += 1;
        }
        c
    }
}

fn weighted(w: &[f64]) -> Option<WeightedIndex<f64>> {
    WeightedIndex::new(w.iter().map(|&v| v.max(0.0))).ok()
}

/// Maximal coupling of the exit-cell laws of walks from `y` and `z` leaving
/// the closed ball of radius `R·M` about `center`, with exit sites drawn
/// from each marginal given its cell.
pub fn basic_coupling(
    env: &Environment,
    center: &[i64],
    radius: f64,
    y: &[i64],
    z: &[i64],
    cells: &CouplingCells,
    m: f64,
    opts: &CouplingOptions,
) -> Result<CouplingResult> {
    let d = env.dim();
    let r2 = radius * radius;
    for p in [y, z] {
        if p.len() != d || norm2_sq(&diff(p, center)) as f64 > r2 {
            return Err(Error::Argument(format!("{p:?} is not in the ball of radius {radius} about {center:?}")));
        }
    }
    if !(m >= 1.0) {
        return Err(Error::Argument(format!("expansion M must be at least 1, got {m}")));
    }
    if opts.replicates == 0 {
        return Err(Error::SampleSize("zero replicates".into()));
    }
    let cf: Vec<f64> = center.iter().map(|&c| c as f64).collect();
    let dom = LatticeDomain::closed_ball(radius * m, &cf)?;
    let bsites = dom.boundary_sites();
    let (labels, n_cells): (Vec<usize>, usize) = match cells {
        CouplingCells::Partition(p) => {
            if p.dim != d {
                return Err(Error::Argument("partition dimension differs from the environment".into()));
            }
            (bsites.iter().map(|x| p.cell_of(&direction(&diff(x, center)))).collect(), p.n_cells())
        }
        CouplingCells::Sites => ((0..bsites.len()).collect(), bsites.len()),
    };
    let sites = harmonic_measure(env, &dom, &[y.to_vec(), z.to_vec()], ExitTargets::Sites, SolveOptions::default())?;
    let law = |row: &[f64]| {
        let mut l = vec![0.0; n_cells];
        for (b, &p) in row.iter().enumerate() {
            l[labels[b]] += p;
        }
        l
    };
    let (y_law, z_law) = (law(sites.row(0)), law(sites.row(1)));
    let overlap: Vec<f64> = y_law.iter().zip(&z_law).map(|(a, b)| a.min(*b)).collect();
    let shared: f64 = overlap.iter().sum();
    let w_shared = weighted(&overlap);
    let w_y = weighted(&y_law.iter().zip(&overlap).map(|(a, o)| a - o).collect::<Vec<_>>());
    let w_z = weighted(&z_law.iter().zip(&overlap).map(|(a, o)| a - o).collect::<Vec<_>>());

    let draws: Vec<(usize, usize, u64)> = (0..opts.replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(opts.seed, r as u64);
            let u: f64 = rng.gen();
            let (cy, cz) = match (&w_shared, &w_y, &w_z) {
                (Some(ws), _, _) if u < shared => {
                    let c = ws.sample(&mut rng);
                    (c, c)
                }
                (_, Some(wy), Some(wz)) => (wy.sample(&mut rng), wz.sample(&mut rng)),
                // residual mass lost to rounding: fall back to the shared part
                (Some(ws), _, _) => {
                    let c = ws.sample(&mut rng);
                    (c, c)
                }
                _ => unreachable!("exit laws sum to one"),
            };
            (cy, cz, rng.gen())
        })
        .collect();

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_cells];
    for (b, &l) in labels.iter().enumerate() {
        members[l].push(b);
    }
    let runs: Vec<CoupledRun> = if opts.trajectories {
        let needed: BTreeSet<usize> = draws.iter().flat_map(|&(a, b, _)| [a, b]).collect();
        let system = DirichletSystem::new(env, &dom, SolveOptions::default())?;
        let h: BTreeMap<usize, Vec<f64>> = needed
            .into_par_iter()
            .map(|c| {
                let g: Vec<f64> = labels.iter().map(|&l| f64::from(u8::from(l == c))).collect();
                system.solve(&g).map(|s| (c, s.interior))
            })
            .collect::<Result<_>>()?;
        draws
            .par_iter()
            .map(|&(cy, cz, s)| {
                let py = doob_walk(env, &dom, &labels, cy, &h[&cy], y, s, 0)?;
                let pz = doob_walk(env, &dom, &labels, cz, &h[&cz], z, s, 1)?;
                Ok(CoupledRun {
                    y_cell: cy,
                    z_cell: cz,
                    y_exit: py.last().cloned().expect("nonempty path"),
                    z_exit: pz.last().cloned().expect("nonempty path"),
                    y_path: Some(py),
                    z_path: Some(pz),
                    success: cy == cz,
                })
            })
            .collect::<Result<_>>()?
    } else {
        let given = |row: &[f64], c: usize, rng: &mut WalkRng| -> Vec<i64> {
            let ws: Vec<f64> = members[c].iter().map(|&b| row[b]).collect();
            let b = match weighted(&ws) {
                Some(w) => members[c][w.sample(rng)],
                None => members[c][0],
            };
            bsites[b].clone()
        };
        draws
            .iter()
            .map(|&(cy, cz, s)| {
                let mut rng = stream_rng(s, 0);
                CoupledRun {
                    y_cell: cy,
                    z_cell: cz,
                    y_exit: given(sites.row(0), cy, &mut rng),
                    z_exit: given(sites.row(1), cz, &mut rng),
                    y_path: None,
                    z_path: None,
                    success: cy == cz,
                }
            })
            .collect()
    };
    Ok(CouplingResult {
        success: Proportion::new(runs.iter().filter(|r| r.success).count(), runs.len()),
        tv: total_variation(&y_law, &z_law),
        y_law,
        z_law,
        runs,
    })
}

/// Walk conditioned to leave through cell `c`: transitions reweighted by
/// `h(x') / h(x)` with `h` the exit probability through `c`.
#[allow(clippy::too_many_arguments)]
fn doob_walk(
    env: &Environment,
    dom: &LatticeDomain,
    labels: &[usize],
    c: usize,
    h: &[f64],
    start: &[i64],
    seed: u64,
    stream: u64,
) -> Result<Vec<Vec<i64>>> {
    let hv = |x: &[i64]| match dom.role(x) {
        SiteRole::Interior(o) => h[o as usize].max(0.0),
        SiteRole::Boundary(o) => f64::from(u8::from(labels[o as usize] == c)),
        SiteRole::Outside => 0.0,
    };
    let mut rng = stream_rng(seed, stream);
    let mut x = start.to_vec();
    let mut path = vec![x.clone()];
    const MAX_STEPS: usize = 100_000_000;
    while matches!(dom.role(&x), SiteRole::Interior(_)) {
        let w = env
            .weights_at(&x)
            .ok_or_else(|| Error::BoxEscape { site: x.clone() })?;
        let mut moves = Vec::with_capacity(2 * w.len());
        for (a, &p) in w.iter().enumerate() {
            for s in [1, -1] {
                let mut n = x.clone();
                n[a] += s;
                moves.push((n.clone(), p * hv(&n)));
            }
        }
        let idx = WeightedIndex::new(moves.iter().map(|m| m.1))
            .map_err(|_| Error::Domain(format!("conditioned walk reached {x:?} where the exit cell is unreachable")))?
            .sample(&mut rng);
        x = moves.swap_remove(idx).0;
        path.push(x.clone());
        if path.len() > MAX_STEPS {
            return Err(Error::Domain("conditioned walk exceeded the step limit".into()));
        }
    }
    Ok(path)
}
