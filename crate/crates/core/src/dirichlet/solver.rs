//! Assembly and solution of `L_ω u = 0` on `É` with Dirichlet data on `∂`.
//!
//! The system `(I - P_É) u = P_∂ g` is a nonsingular M-matrix whenever the
//! walk leaves `É` almost surely, which holds for every balanced environment
//! on a finite domain. Interior sites are numbered in row-major order of the
//! bounding box, so the matrix is banded with half-bandwidth about one
//! hyperplane of the domain, and LU without pivoting is stable.

use super::domain::{LatticeDomain, SiteRole};
use crate::env::Environment;
use crate::error::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

/// Largest interior size handled by the banded direct solver.
pub const DIRECT_CAP: usize = 20_000;
/// Largest band storage (entries) the direct solver may allocate.
pub const BAND_ENTRY_CAP: usize = 60_000_000;
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolverKind {
    /// Direct when the domain fits under [`DIRECT_CAP`], Gauss–Seidel otherwise.
    Auto,
    Direct,
    /// Gauss–Seidel, falling back to the direct solver on stall.
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolverTag {
    Direct,
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveOptions {
    pub tol: f64,
    pub kind: SolverKind,
    /// Sweep cap for Gauss–Seidel; `None` means `50 · |É|`.
    pub max_sweeps: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            kind: SolverKind::Auto,
            max_sweeps: None,
        }
    }
}

impl SolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// Values of an ω-harmonic function on `É ∪ ∂`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicSolution {
    /// Indexed by interior ordinal.
    pub interior: Vec<f64>,
    /// Indexed by boundary ordinal; equal to the supplied data.
    pub boundary: Vec<f64>,
    /// `max |L_ω u|` over `É`.
    pub residual: f64,
    pub solver: SolverTag,
    pub iterations: usize,
}

impl HarmonicSolution {
    pub fn value(&self, dom: &LatticeDomain, x: &[i64]) -> Option<f64> {
        match dom.role(x) {
            SiteRole::Interior(o) => Some(self.interior[o as usize]),
            SiteRole::Boundary(o) => Some(self.boundary[o as usize]),
            SiteRole::Outside => None,
        }
    }

    pub fn max(&self) -> f64 {
        self.interior.iter().chain(&self.boundary).copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.interior.iter().chain(&self.boundary).copied().fold(f64::INFINITY, f64::min)
    }
}

/// `I - P` restricted to the interior, in compressed rows.
#[derive(Debug, Clone)]
pub struct DirichletOperator {
    n: usize,
    n_boundary: usize,
    row_ptr: Vec<usize>,
    int_cols: Vec<u32>,
    int_w: Vec<f64>,
    bnd_ptr: Vec<usize>,
    bnd_cols: Vec<u32>,
    bnd_w: Vec<f64>,
    bandwidth: usize,
}

impl DirichletOperator {
    pub fn assemble(env: &Environment, dom: &LatticeDomain) -> Result<Self> {
        if env.dim() != dom.dim() {
            return Err(Error::Argument("environment and domain dimensions differ".into()));
        }
        let bbox = dom.bbox();
        let eb = env.bounds();
        let d = dom.dim();
        let n = dom.n_interior();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut bnd_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        bnd_ptr.push(0);
        let (mut int_cols, mut int_w, mut bnd_cols, mut bnd_w) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        let mut bandwidth = 0usize;
        for (ord, &bi) in dom.interior_indices().iter().enumerate() {
            let x = bbox.coords(bi);
            let ei = eb.index(&x).ok_or_else(|| Error::BoxEscape { site: x.clone() })?;
            let w = env.weights(ei);
            for (axis, &p) in w.iter().enumerate().take(d) {
                if p <= 0.0 {
                    continue;
                }
                for positive in [true, false] {
                    let nb = bbox.neighbor(bi, axis, positive).expect("interior neighbours lie in the box");
                    match dom.role_at(nb) {
                        SiteRole::Interior(j) => {
                            bandwidth = bandwidth.max((j as usize).abs_diff(ord));
                            int_cols.push(j);
                            int_w.push(p);
                        }
                        SiteRole::Boundary(j) => {
                            bnd_cols.push(j);
                            bnd_w.push(p);
                        }
                        SiteRole::Outside => unreachable!("interior site with outside neighbour"),
                    }
                }
            }
            row_ptr.push(int_cols.len());
            bnd_ptr.push(bnd_cols.len());
        }
        Ok(Self {
            n,
            n_boundary: dom.n_boundary(),
            row_ptr,
            int_cols,
            int_w,
            bnd_ptr,
            bnd_cols,
            bnd_w,
            bandwidth,
        })
    }

    pub fn n_interior(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// `P_∂ g` for boundary data `g`.
    pub fn boundary_rhs(&self, g: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                (self.bnd_ptr[i]..self.bnd_ptr[i + 1])
                    .map(|k| self.bnd_w[k] * g[self.bnd_cols[k] as usize])
                    .sum()
            })
            .collect()
    }

    /// `max_i |L_ω u(i)|`.
    pub fn residual(&self, u: &[f64], g: &[f64]) -> f64 {
        (0..self.n)
            .map(|i| {
                let mut acc = -u[i];
                for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                    acc += self.int_w[k] * u[self.int_cols[k] as usize];
                }
                for k in self.bnd_ptr[i]..self.bnd_ptr[i + 1] {
                    acc += self.bnd_w[k] * g[self.bnd_cols[k] as usize];
                }
                acc.abs()
            })
            .fold(0.0, f64::max)
    }

    fn gauss_seidel(&self, g: &[f64], tol: f64, max_sweeps: usize) -> (Vec<f64>, f64, usize) {
        let rhs = self.boundary_rhs(g);
        let mut u = vec![0.0; self.n];
        let mut sweeps = 0;
        let mut res = self.residual(&u, g);
        while res > tol && sweeps < max_sweeps {
            for _ in 0..10 {
                for i in 0..self.n {
                    let mut acc = rhs[i];
                    for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                        acc += self.int_w[k] * u[self.int_cols[k] as usize];
                    }
                    u[i] = acc;
                }
                sweeps += 1;
            }
            res = self.residual(&u, g);
        }
        (u, res, sweeps)
    }

    fn band_fits(&self) -> bool {
        self.n <= DIRECT_CAP && self.n.saturating_mul(2 * self.bandwidth + 1) <= BAND_ENTRY_CAP
    }

    pub fn factorize(&self) -> Result<BandLu> {
        if !self.band_fits() {
            return Err(Error::Capacity(format!(
                "direct solve needs {} interior sites with bandwidth {} (caps {DIRECT_CAP} sites, {BAND_ENTRY_CAP} entries)",
                self.n, self.bandwidth
            )));
        }
        BandLu::new(self)
    }
}

/// LU factors of a banded matrix, stored row by row over `[i - bw, i + bw]`.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    bw: usize,
    a: Vec<f64>,
}

impl BandLu {
    fn new(op: &DirichletOperator) -> Result<Self> {
        let n = op.n;
        let bw = op.bandwidth;
        let width = 2 * bw + 1;
        let mut a = vec![0.0; n * width];
        for i in 0..n {
            a[i * width + bw] = 1.0;
            for k in op.row_ptr[i]..op.row_ptr[i + 1] {
                let j = op.int_cols[k] as usize;
                a[i * width + (j + bw - i)] -= op.int_w[k];
            }
        }
        for k in 0..n {
            let pivot = a[k * width + bw];
            if !(pivot.abs() > 1e-300) {
                return Err(Error::Solver {
                    residual: f64::NAN,
                    iterations: 0,
                    message: format!("zero pivot at row {k}"),
                });
            }
            let last = (k + bw).min(n - 1);
            for i in k + 1..=last {
                let lik_pos = i * width + (k + bw - i);
                let l = a[lik_pos] / pivot;
                if l == 0.0 {
                    continue;
                }
                a[lik_pos] = l;
                let (upper, lower) = a.split_at_mut(i * width);
                let krow = &upper[k * width..(k + 1) * width];
                let irow = &mut lower[..width];
                for j in k + 1..=last {
                    irow[j + bw - i] -= l * krow[j + bw - k];
                }
            }
        }
        Ok(Self { n, bw, a })
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let (n, bw, width) = (self.n, self.bw, 2 * self.bw + 1);
        for i in 0..n {
            let row = &self.a[i * width..(i + 1) * width];
            let mut acc = x[i];
            for j in i.saturating_sub(bw)..i {
                acc -= row[j + bw - i] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let row = &self.a[i * width..(i + 1) * width];
            let mut acc = x[i];
            for j in i + 1..(i + bw + 1).min(n) {
                acc -= row[j + bw - i] * x[j];
            }
            x[i] = acc / row[bw];
        }
    }
}

/// An assembled Dirichlet problem whose factorization (if any) is shared by
/// every right-hand side.
#[derive(Debug)]
pub struct DirichletSystem {
    op: DirichletOperator,
    factor: Option<BandLu>,
    opts: SolveOptions,
}

impl DirichletSystem {
    pub fn new(env: &Environment, dom: &LatticeDomain, opts: SolveOptions) -> Result<Self> {
        let op = DirichletOperator::assemble(env, dom)?;
        let factor = match opts.kind {
            SolverKind::Direct => Some(op.factorize()?),
            SolverKind::Auto if op.band_fits() => Some(op.factorize()?),
            _ => None,
        };
        Ok(Self { op, factor, opts })
    }

    pub fn operator(&self) -> &DirichletOperator {
        &self.op
    }

    pub fn solve(&self, g: &[f64]) -> Result<HarmonicSolution> {
        if g.len() != self.op.n_boundary {
            return Err(Error::Domain(format!(
                "boundary data has {} values, domain has {} boundary sites",
                g.len(),
                self.op.n_boundary
            )));
        }
        let (u, iterations, solver) = match &self.factor {
            Some(lu) => {
                let mut u = self.op.boundary_rhs(g);
                lu.solve_in_place(&mut u);
                (u, 0, SolverTag::Direct)
            }
            None => {
                let cap = self.opts.max_sweeps.unwrap_or(50 * self.op.n);
                let (u, res, sweeps) = self.op.gauss_seidel(g, self.opts.tol, cap);
                if res <= self.opts.tol {
                    (u, sweeps, SolverTag::Iterative)
                } else if self.op.band_fits() {
                    let lu = self.op.factorize()?;
                    let mut u = self.op.boundary_rhs(g);
                    lu.solve_in_place(&mut u);
                    (u, sweeps, SolverTag::Direct)
                } else {
                    return Err(Error::Solver {
                        residual: res,
                        iterations: sweeps,
                        message: "Gauss-Seidel stalled and the domain exceeds the direct-solve cap".into(),
                    });
                }
            }
        };
        let residual = self.op.residual(&u, g);
        if !(residual <= self.opts.tol) {
            return Err(Error::Solver {
                residual,
                iterations,
                message: "residual above tolerance".into(),
            });
        }
        Ok(HarmonicSolution {
            interior: u,
            boundary: g.to_vec(),
            residual,
            solver,
            iterations,
        })
    }

    /// Solves for many right-hand sides in parallel.
    pub fn solve_many(&self, data: &[Vec<f64>]) -> Result<Vec<HarmonicSolution>> {
        data.par_iter().map(|g| self.solve(g)).collect()
    }
}

/// Solves `L_ω u = 0` on `É`, `u = g` on `∂`.
pub fn solve_dirichlet(
    env: &Environment,
    dom: &LatticeDomain,
    boundary_data: &[f64],
    opts: SolveOptions,
) -> Result<HarmonicSolution> {
    DirichletSystem::new(env, dom, opts)?.solve(boundary_data)
}

/// Evaluates boundary data from a function of the site.
pub fn boundary_values(dom: &LatticeDomain, f: impl Fn(&[i64]) -> f64) -> Vec<f64> {
    dom.boundary_sites().iter().map(|x| f(x)).collect()
}

/// `L_ω u(x) = Σ_e ω(x, e) [u(x + e) - u(x)]`. Only neighbours reached with
/// positive weight need a value.
pub fn apply_generator(env: &Environment, u: impl Fn(&[i64]) -> Option<f64>, x: &[i64]) -> Result<f64> {
    let w = env.weights_at(x).ok_or_else(|| Error::BoxEscape { site: x.to_vec() })?;
    let ux = u(x).ok_or_else(|| Error::Domain(format!("u undefined at {x:?}")))?;
    let mut acc = 0.0;
    let mut y = x.to_vec();
    for (axis, &p) in w.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        for s in [1, -1] {
            y[axis] += s;
            let uy = u(&y).ok_or_else(|| Error::Domain(format!("u undefined at neighbour {y:?}")))?;
            acc += p * (uy - ux);
            y[axis] -= s;
        }
    }
    Ok(acc)
}
