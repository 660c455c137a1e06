use super::domain::{LatticeDomain, SiteRole};
use super::solver::{DirichletSystem, SolveOptions};
use crate::env::Environment;
use crate::error::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

/// Columns of a harmonic-measure matrix.
#[derive(Debug, Clone, Copy)]
pub enum ExitTargets<'a> {
    /// One column per boundary site, in boundary ordinal order.
    Sites,
    /// One column per cell; `labels[b]` is the cell of boundary ordinal `b`.
    Cells { labels: &'a [usize], n_cells: usize },
}

/// `matrix[r][c] = P_ω^{x_r}(X_τ ∈ column c)` for exit time `τ` from `É`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExitDistribution {
    pub sources: Vec<Vec<i64>>,
    pub matrix: Vec<Vec<f64>>,
    pub n_columns: usize,
    /// Largest solver residual over the column solves.
    pub residual: f64,
}

impl ExitDistribution {
    pub fn row(&self, r: usize) -> &[f64] {
        &self.matrix[r]
    }

    /// `Σ_c matrix[r][c] g[c]` for each row.
    pub fn apply(&self, g: &[f64]) -> Vec<f64> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(g).map(|(p, v)| p * v).sum())
            .collect()
    }

    pub fn max_row_sum_error(&self) -> f64 {
        self.matrix
            .iter()
            .map(|row| (row.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Harmonic measure from each source: one Dirichlet solve per column against
/// a shared factorization.
pub fn harmonic_measure(
    env: &Environment,
    dom: &LatticeDomain,
    sources: &[Vec<i64>],
    targets: ExitTargets<'_>,
    opts: SolveOptions,
) -> Result<ExitDistribution> {
    let src_ord: Vec<usize> = sources
        .iter()
        .map(|x| match dom.role(x) {
            SiteRole::Interior(o) => Ok(o as usize),
            _ => Err(Error::Domain(format!("source {x:?} is not an interior site"))),
        })
        .collect::<Result<_>>()?;
    let nb = dom.n_boundary();
    let (n_columns, labels): (usize, Vec<usize>) = match targets {
        ExitTargets::Sites => (nb, (0..nb).collect()),
        ExitTargets::Cells { labels, n_cells } => {
            if labels.len() != nb {
                return Err(Error::Domain(format!(
                    "{} cell labels for {nb} boundary sites",
                    labels.len()
                )));
            }
            if let Some(&bad) = labels.iter().find(|&&l| l >= n_cells) {
                return Err(Error::Domain(format!("cell label {bad} out of range {n_cells}")));
            }
            (n_cells, labels.to_vec())
        }
    };
    let system = DirichletSystem::new(env, dom, opts)?;
    let columns: Vec<(Vec<f64>, f64)> = (0..n_columns)
        .into_par_iter()
        .map(|c| {
            if !labels.contains(&c) {
                return Ok((vec![0.0; src_ord.len()], 0.0));
            }
            let g: Vec<f64> = labels.iter().map(|&l| if l == c { 1.0 } else { 0.0 }).collect();
            let sol = system.solve(&g)?;
            Ok((src_ord.iter().map(|&o| sol.interior[o]).collect(), sol.residual))
        })
        .collect::<Result<_>>()?;
    let mut matrix = vec![vec![0.0; n_columns]; sources.len()];
    let mut residual: f64 = 0.0;
    for (c, (col, res)) in columns.into_iter().enumerate() {
        residual = residual.max(res);
        for (r, v) in col.into_iter().enumerate() {
            matrix[r][c] = v;
        }
    }
    Ok(ExitDistribution {
        sources: sources.to_vec(),
        matrix,
        n_columns,
        residual,
    })
}
