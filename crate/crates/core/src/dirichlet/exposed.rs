//! Exposed points: `z ∈ Q` is exposed when some `β` makes
//! `h(x) ≤ h(z) + ⟨β, x - z⟩` for all `x ∈ Q ∪ ∂^{(k)}Q`.
//!
//! Feasibility in `β` is decided through the dual program
//! `max Σ b_x y_x  s.t.  Σ y_x (x - z) = 0, Σ y_x = 1, y ≥ 0`
//! with `b_x = h(x) - h(z) - slack`. Its optimal row duals are `(β, μ)` with
//! `⟨β, x - z⟩ + μ ≥ b_x`, so `z` is exposed iff the optimum is `≤ 0`. When the
//! dual is infeasible, `z` is a vertex of the convex hull of the points and a
//! separating direction, suitably scaled, is a witness.

use super::domain::widened_boundary;
use super::lp::{simplex_max, LpOutcome};
use serde::Serialize;

/// Constraint slack for the relaxed touching condition.
pub const EXPOSED_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExposedSite {
    pub site: Vec<i64>,
    pub exposed: bool,
    /// A feasible `β`, re-checked against every constraint.
    pub witness: Option<Vec<f64>>,
    /// For non-exposed sites: convex weights `y_x` on points with
    /// `Σ y_x (x - z) = 0` and `Σ y_x (h(x) - h(z)) > slack`.
    pub certificate: Option<Vec<(Vec<i64>, f64)>>,
    /// Largest violation `h(x) - h(z) - ⟨β, x - z⟩` of the witness.
    pub witness_violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExposedSet {
    pub sites: Vec<ExposedSite>,
    pub k: usize,
    pub slack: f64,
}

impl ExposedSet {
    pub fn exposed(&self) -> impl Iterator<Item = &ExposedSite> {
        self.sites.iter().filter(|s| s.exposed)
    }

    pub fn count(&self) -> usize {
        self.exposed().count()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Decides exposure of every site of `q` against `Q ∪ ∂^{(k)}Q`.
pub fn exposed_points(h: impl Fn(&[i64]) -> f64, q: &[Vec<i64>], k: usize) -> ExposedSet {
    let mut points: Vec<Vec<i64>> = q.to_vec();
    points.extend(widened_boundary(q, k));
    let hv: Vec<f64> = points.iter().map(|x| h(x)).collect();
    let sites = q
        .iter()
        .enumerate()
        .map(|(zi, z)| decide(z, hv[zi], &points, &hv))
        .collect();
    ExposedSet {
        sites,
        k,
        slack: EXPOSED_SLACK,
    }
}

fn decide(z: &[i64], hz: f64, points: &[Vec<i64>], hv: &[f64]) -> ExposedSite {
    let d = z.len();
    let others: Vec<usize> = (0..points.len()).filter(|&i| points[i].as_slice() != z).collect();
    let a: Vec<Vec<f64>> = others
        .iter()
        .map(|&i| points[i].iter().zip(z).map(|(p, q)| (p - q) as f64).collect())
        .collect();
    let b: Vec<f64> = others.iter().map(|&i| hv[i] - hz - EXPOSED_SLACK).collect();
    let check = |beta: &[f64]| -> f64 {
        a.iter()
            .zip(&others)
            .map(|(ax, &i)| hv[i] - hz - dot(beta, ax))
            .fold(0.0, f64::max)
    };
    if others.is_empty() {
        return ExposedSite {
            site: z.to_vec(),
            exposed: true,
            witness: Some(vec![0.0; d]),
            certificate: None,
            witness_violation: 0.0,
        };
    }
    // rows: d coordinate rows, then the normalization row
    let mut rows = vec![vec![0.0; others.len()]; d + 1];
    for (j, ax) in a.iter().enumerate() {
        for r in 0..d {
            rows[r][j] = ax[r];
        }
        rows[d][j] = 1.0;
    }
    let mut rhs = vec![0.0; d + 1];
    rhs[d] = 1.0;
    match simplex_max(&rows, &rhs, &b) {
        LpOutcome::Optimal { y, value, duals } => {
            if value <= 0.0 {
                let beta = duals[..d].to_vec();
                let viol = check(&beta);
                ExposedSite {
                    site: z.to_vec(),
                    exposed: true,
                    witness: Some(beta),
                    certificate: None,
                    witness_violation: viol,
                }
            } else {
                let cert = y
                    .iter()
                    .enumerate()
                    .filter(|(_, &w)| w > 0.0)
                    .map(|(j, &w)| (points[others[j]].clone(), w))
                    .collect();
                ExposedSite {
                    site: z.to_vec(),
                    exposed: false,
                    witness: None,
                    certificate: Some(cert),
                    witness_violation: f64::NAN,
                }
            }
        }
        LpOutcome::Infeasible { farkas } => {
            // ⟨f_β, a_x⟩ + f_μ ≤ 0 with f_μ > 0: γ = -f_β is strictly positive on every a_x
            let gamma: Vec<f64> = farkas[..d].iter().map(|v| -v).collect();
            let t = a
                .iter()
                .zip(&b)
                .map(|(ax, bx)| {
                    let g = dot(&gamma, ax);
                    if g > 0.0 {
                        bx / g
                    } else {
                        f64::INFINITY
                    }
                })
                .fold(0.0, f64::max)
                + 1.0;
            let beta: Vec<f64> = gamma.iter().map(|g| g * t).collect();
            let viol = check(&beta);
            ExposedSite {
                site: z.to_vec(),
                exposed: true,
                witness: Some(beta),
                certificate: None,
                witness_violation: viol,
            }
        }
        LpOutcome::Unbounded => unreachable!("the dual feasible region is a simplex"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeBox;

    fn square(half: i64) -> Vec<Vec<i64>> {
        LatticeBox::centered(2, half).unwrap().iter_coords().collect()
    }

    #[test]
    fn linear_and_concave_expose_everything() {
        let q = square(2);
        let lin = exposed_points(|x| 2.0 * x[0] as f64 - 0.5 * x[1] as f64, &q, 2);
        assert_eq!(lin.count(), q.len());
        for s in &lin.sites {
            assert!(s.witness_violation <= 1e-8);
        }
        let concave = exposed_points(|x| -((x[0] * x[0] + x[1] * x[1]) as f64), &q, 3);
        assert_eq!(concave.count(), q.len());
        for s in &concave.sites {
            assert!(s.witness_violation <= 1e-8, "{s:?}");
        }
    }

    #[test]
    fn convex_exposes_nothing() {
        let q = square(2);
        let set = exposed_points(|x| (x[0] * x[0] + x[1] * x[1]) as f64, &q, 2);
        assert_eq!(set.count(), 0);
        for s in &set.sites {
            let cert = s.certificate.as_ref().unwrap();
            let total: f64 = cert.iter().map(|c| c.1).sum();
            assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn one_dimensional_matches_upper_hull() {
        let q: Vec<Vec<i64>> = (0..8).map(|i| vec![i]).collect();
        let vals = [0.0, 3.0, 1.0, 4.0, 4.0, 2.0, 5.0, -1.0];
        let h = |x: &[i64]| {
            if (0..8).contains(&x[0]) {
                vals[x[0] as usize]
            } else {
                -10.0
            }
        };
        let set = exposed_points(h, &q, 2);
        // oracle: z exposed iff no chord over two other points lies strictly above
        let pts: Vec<(i64, f64)> = (-1..9).map(|i| (i, h(&[i]))).collect();
        for s in &set.sites {
            let z = s.site[0];
            let hz = h(&[z]);
            let mut above = false;
            for &(l, hl) in pts.iter().filter(|p| p.0 < z) {
                for &(r, hr) in pts.iter().filter(|p| p.0 > z) {
                    let chord = hl + (hr - hl) * (z - l) as f64 / (r - l) as f64;
                    above |= chord > hz + 1e-12;
                }
            }
            assert_eq!(s.exposed, !above, "site {z}");
        }
    }
}
