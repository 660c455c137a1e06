//! Subsets of the unit sphere and Brownian exit probabilities from the unit
//! ball for a diagonal covariance.

use crate::error::{Error, Result};
use crate::rng::stream_rng;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

/// Cube-sphere partition: each point `u` lies on the face of its largest
/// coordinate, and the face coordinates `u_j / |u_a|` are binned on a regular
/// `m^{d-1}` grid. Radial projection from the cube faces to the sphere is
/// 1-Lipschitz, so every cell has diameter at most `2√(d-1)/m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpherePartition {
    pub dim: usize,
    pub bins: usize,
    pub mesh: f64,
}

impl SpherePartition {
    pub fn new(dim: usize, mesh: f64) -> Result<Self> {
        if dim == 0 || !(mesh > 0.0) {
            return Err(Error::Argument(format!("partition needs d ≥ 1 and mesh > 0, got {dim}, {mesh}")));
        }
        let bins = if dim == 1 {
            1
        } else {
            (2.0 * ((dim - 1) as f64).sqrt() / mesh).ceil().max(1.0) as usize
        };
        Ok(Self { dim, bins, mesh })
    }

    pub fn n_cells(&self) -> usize {
        2 * self.dim * self.bins.pow(self.dim as u32 - 1)
    }

    /// Upper bound on every cell diameter.
    pub fn diameter_bound(&self) -> f64 {
        if self.dim == 1 {
            0.0
        } else {
            2.0 * ((self.dim - 1) as f64).sqrt() / self.bins as f64
        }
    }

    /// Cell of a nonzero direction; ties go to the lowest index.
    pub fn cell_of(&self, u: &[f64]) -> usize {
        let mut face = 0;
        for i in 1..self.dim {
            if u[i].abs() > u[face].abs() {
                face = i;
            }
        }
        let top = u[face].abs();
        let mut id = 2 * face + usize::from(u[face] < 0.0);
        for j in (0..self.dim).filter(|&j| j != face) {
            let t = (u[j] / top).clamp(-1.0, 1.0);
            let pos = (t + 1.0) / 2.0 * self.bins as f64;
            let bin = (pos.ceil() as usize).clamp(1, self.bins) - 1;
            id = id * self.bins + bin;
        }
        id
    }
}

/// A measurable subset of the unit sphere.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum CellSet {
    Whole,
    /// Open hemisphere `{u : ⟨n, u⟩ > 0}`.
    HalfSpace { normal: Vec<f64> },
    /// Closed cap `{u : ⟨c, u⟩ ≥ cos θ}` with `c` a unit vector.
    Cap { center: Vec<f64>, angle: f64 },
    Cell { partition: SpherePartition, index: usize },
}

impl CellSet {
    pub fn contains(&self, u: &[f64]) -> bool {
        match self {
            Self::Whole => true,
            Self::HalfSpace { normal } => dot(normal, u) > 0.0,
            Self::Cap { center, angle } => dot(center, u) >= angle.cos() - 1e-15,
            Self::Cell { partition, index } => partition.cell_of(u) == *index,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Direction of a lattice site, `x / ‖x‖₂`.
pub fn direction(x: &[i64]) -> Vec<f64> {
    let v: Vec<f64> = x.iter().map(|&c| c as f64).collect();
    let n = norm(&v);
    v.iter().map(|c| c / n).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WosOptions {
    /// Stop once within `shell_eps` times the inradius of the boundary.
    pub shell_eps: f64,
    pub replicates: usize,
    pub seed: u64,
    pub max_steps: usize,
}

impl Default for WosOptions {
    fn default() -> Self {
        Self {
            shell_eps: 1e-4,
            replicates: 20_000,
            seed: 0,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BmExit {
    pub p: f64,
    pub stderr: f64,
    pub replicates: usize,
}

const WOS_BLOCK: usize = 512;

/// One exit point of Brownian motion with covariance `Σ` from the unit ball,
/// by walk-on-spheres in the frame `y = Σ^{-1/2} x`. The ball maps to the
/// ellipsoid `{Σ_i Σ_ii y_i² < 1}`, and `(1 - ‖x‖) / max √Σ_ii` is the radius
/// of a sphere around `y` inside it.
fn wos_exit<R: Rng>(sqrt_sigma: &[f64], start: &[f64], opts: &WosOptions, rng: &mut R) -> Result<Vec<f64>> {
    let d = start.len();
    let smax = sqrt_sigma.iter().copied().fold(0.0, f64::max);
    let inradius = 1.0 / smax;
    let mut y: Vec<f64> = start.iter().zip(sqrt_sigma).map(|(x, s)| x / s).collect();
    let mut x = start.to_vec();
    let mut dir = vec![0.0; d];
    for _ in 0..opts.max_steps {
        let r = (1.0 - norm(&x)) / smax;
        if r < opts.shell_eps * inradius {
            let n = norm(&x);
            return Ok(x.iter().map(|v| v / n).collect());
        }
        loop {
            for v in dir.iter_mut() {
                *v = rng.sample(StandardNormal);
            }
            let n = norm(&dir);
            if n > 0.0 {
                for v in dir.iter_mut() {
                    *v /= n;
                }
                break;
            }
        }
        for i in 0..d {
            y[i] += r * dir[i];
            x[i] = y[i] * sqrt_sigma[i];
        }
    }
    Err(Error::WosTimeout { steps: opts.max_steps })
}

fn check_start(sigma: &[f64], start: &[f64]) -> Result<()> {
    if sigma.len() != start.len() || sigma.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::Argument("Σ must be positive diagonal of the start dimension".into()));
    }
    if !(norm(start) < 1.0) {
        return Err(Error::Domain(format!("start {start:?} is not inside the unit ball")));
    }
    Ok(())
}

/// Exit cell counts for `opts.replicates` walks, each exit assigned by
/// `classify`.
fn exit_counts(
    sigma: &[f64],
    start: &[f64],
    opts: &WosOptions,
    n_classes: usize,
    classify: &(dyn Fn(&[f64]) -> usize + Sync),
) -> Result<Vec<usize>> {
    check_start(sigma, start)?;
    let sq: Vec<f64> = sigma.iter().map(|s| s.sqrt()).collect();
    let blocks = opts.replicates.div_ceil(WOS_BLOCK);
    let per_block: Vec<Vec<usize>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(opts.seed, b as u64);
            let mut counts = vec![0usize; n_classes];
            let n = WOS_BLOCK.min(opts.replicates - b * WOS_BLOCK);
            for _ in 0..n {
                let u = wos_exit(&sq, start, opts, &mut rng)?;
                counts[classify(&u)] += 1;
            }
            Ok(counts)
        })
        .collect::<Result<_>>()?;
    let mut total = vec![0usize; n_classes];
    for c in per_block {
        for (t, v) in total.iter_mut().zip(c) {
            *t += v;
        }
    }
    Ok(total)
}

/// `P^x(B exits the unit ball through A)` for Brownian motion with diagonal
/// covariance `Σ`. In `d = 1` the exact value `(1 ± x)/2` is returned.
pub fn bm_exit_probability(sigma: &[f64], target: &CellSet, start: &[f64], opts: &WosOptions) -> Result<BmExit> {
    check_start(sigma, start)?;
    if matches!(target, CellSet::Whole) {
        return Ok(BmExit { p: 1.0, stderr: 0.0, replicates: 0 });
    }
    if sigma.len() == 1 {
        let right = (1.0 + start[0]) / 2.0;
        let p = f64::from(u8::from(target.contains(&[1.0]))) * right
            + f64::from(u8::from(target.contains(&[-1.0]))) * (1.0 - right);
        return Ok(BmExit { p, stderr: 0.0, replicates: 0 });
    }
    if opts.replicates == 0 {
        return Err(Error::SampleSize("walk-on-spheres needs at least one replicate".into()));
    }
    let counts = exit_counts(sigma, start, opts, 2, &|u| usize::from(!target.contains(u)))?;
    let n = opts.replicates as f64;
    let p = counts[0] as f64 / n;
    Ok(BmExit {
        p,
        stderr: (p * (1.0 - p) / n).sqrt(),
        replicates: opts.replicates,
    })
}

/// Exit probabilities of every cell of a partition; they sum to one exactly.
pub fn bm_exit_distribution(sigma: &[f64], partition: &SpherePartition, start: &[f64], opts: &WosOptions) -> Result<Vec<BmExit>> {
    check_start(sigma, start)?;
    if sigma.len() != partition.dim {
        return Err(Error::Argument("partition dimension differs from Σ".into()));
    }
    if sigma.len() == 1 {
        let right = (1.0 + start[0]) / 2.0;
        return Ok([right, 1.0 - right]
            .iter()
            .map(|&p| BmExit { p, stderr: 0.0, replicates: 0 })
            .collect());
    }
    if opts.replicates == 0 {
        return Err(Error::SampleSize("walk-on-spheres needs at least one replicate".into()));
    }
    let counts = exit_counts(sigma, start, opts, partition.n_cells(), &|u| partition.cell_of(u))?;
    let n = opts.replicates as f64;
    Ok(counts
        .into_iter()
        .map(|c| {
            let p = c as f64 / n;
            BmExit {
                p,
                stderr: (p * (1.0 - p) / n).sqrt(),
                replicates: opts.replicates,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_cells_and_ties() {
        let p = SpherePartition::new(2, 0.5).unwrap();
        assert_eq!(p.bins, 4);
        assert_eq!(p.n_cells(), 16);
        assert!(p.diameter_bound() <= 0.5);
        // tie between axes 0 and 1 goes to face 0
        let diag = [0.5f64.sqrt(), 0.5f64.sqrt()];
        assert_eq!(p.cell_of(&diag) / p.bins, 0);
        // a bin edge goes to the lower bin
        assert_eq!(p.cell_of(&[1.0, 0.0]) % p.bins, 1);
        let one = SpherePartition::new(1, 0.1).unwrap();
        assert_eq!(one.n_cells(), 2);
        assert_eq!(one.cell_of(&[1.0]), 0);
        assert_eq!(one.cell_of(&[-1.0]), 1);
    }

    #[test]
    fn partition_cells_are_small() {
        let p = SpherePartition::new(3, 0.6).unwrap();
        let mut pts: Vec<Vec<Vec<f64>>> = vec![Vec::new(); p.n_cells()];
        let mut rng = stream_rng(1, 0);
        for _ in 0..20_000 {
            let v: Vec<f64> = (0..3).map(|_| rng.sample(StandardNormal)).collect();
            let n = norm(&v);
            let u: Vec<f64> = v.iter().map(|c| c / n).collect();
            pts[p.cell_of(&u)].push(u);
        }
        for cell in &pts {
            assert!(!cell.is_empty());
            for a in cell.iter().take(60) {
                for b in cell.iter().take(60) {
                    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
                    assert!(d <= p.mesh + 1e-12);
                }
            }
        }
    }

    #[test]
    fn whole_sphere_and_one_dimension_are_exact() {
        let o = WosOptions::default();
        assert_eq!(bm_exit_probability(&[0.5, 0.5], &CellSet::Whole, &[0.1, 0.2], &o).unwrap().p, 1.0);
        let right = CellSet::HalfSpace { normal: vec![1.0] };
        assert_eq!(bm_exit_probability(&[0.3], &right, &[0.0], &o).unwrap().p, 0.5);
        assert_eq!(bm_exit_probability(&[0.3], &right, &[0.5], &o).unwrap().p, 0.75);
    }

    #[test]
    fn hemisphere_from_center_is_half() {
        let o = WosOptions { replicates: 40_000, seed: 4, ..Default::default() };
        let half = CellSet::HalfSpace { normal: vec![1.0, 0.0] };
        let e = bm_exit_probability(&[1.0, 1.0], &half, &[0.0, 0.0], &o).unwrap();
        assert!((e.p - 0.5).abs() < 3.0 * e.stderr, "{e:?}");
    }

    #[test]
    fn isotropic_poisson_kernel() {
        // Σ = I: exit density from x is (1-|x|²)/|u-x|² / 2π; a cap of half-angle θ
        // around e₁ from x = (a, 0) integrates to (2/π)·atan(((1+a)/(1-a))·tan(θ/2)).
        let o = WosOptions { replicates: 40_000, seed: 9, ..Default::default() };
        let a: f64 = 0.4;
        let theta = std::f64::consts::FRAC_PI_4;
        let cap = CellSet::Cap { center: vec![1.0, 0.0], angle: theta };
        let e = bm_exit_probability(&[1.0, 1.0], &cap, &[a, 0.0], &o).unwrap();
        let exact = 2.0 / std::f64::consts::PI * (((1.0 + a) / (1.0 - a)) * (theta / 2.0).tan()).atan();
        assert!((e.p - exact).abs() < 3.0 * e.stderr + 2e-3, "{} vs {exact}", e.p);
    }

    #[test]
    fn distribution_sums_to_one_and_is_deterministic() {
        let p = SpherePartition::new(2, 0.7).unwrap();
        let o = WosOptions { replicates: 3000, seed: 2, ..Default::default() };
        let a = bm_exit_distribution(&[0.7, 0.3], &p, &[0.2, -0.1], &o).unwrap();
        let b = bm_exit_distribution(&[0.7, 0.3], &p, &[0.2, -0.1], &o).unwrap();
        assert_eq!(a, b);
        let s: f64 = a.iter().map(|e| e.p).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn start_outside_rejected() {
        let o = WosOptions::default();
        assert!(bm_exit_probability(&[1.0, 1.0], &CellSet::Whole, &[1.0, 0.0], &o).is_err());
    }
}
