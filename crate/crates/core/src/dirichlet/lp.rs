//! Dense two-phase simplex for small equality-form programs
//! `max c·y  s.t.  A y = b,  y ≥ 0` with few rows. Bland's rule prevents
//! cycling.

const EPS: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal {
        y: Vec<f64>,
        value: f64,
        /// Row duals `π` with `πᵀA ≥ c` and `π·b = value`.
        duals: Vec<f64>,
    },
    /// Phase one ended with positive infeasibility. `farkas` satisfies
    /// `farkasᵀA ≤ 0` (up to rounding) and `farkas·b > 0`.
    Infeasible { farkas: Vec<f64> },
    Unbounded,
}

struct Tableau {
    m: usize,
    cols: usize,
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    fn duals(&self, cost: &[f64], n: usize) -> Vec<f64> {
        // B⁻¹ sits in the artificial columns n..n+m
        (0..self.m)
            .map(|k| (0..self.m).map(|i| cost[self.basis[i]] * self.t[i][n + k]).sum())
            .collect()
    }

    /// Runs simplex iterations for `cost`, allowing only columns `< allowed`
    /// to enter. Returns false on unboundedness.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> bool {
        let rhs = self.cols;
        loop {
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let z: f64 = (0..self.m).map(|i| cost[self.basis[i]] * self.t[i][j]).sum();
                cost[j] - z > EPS
            });
            let Some(j) = entering else { return true };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.t[i][j];
                if a > EPS {
                    let ratio = self.t[i][rhs] / a;
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => ratio < lr - EPS || (ratio <= lr + EPS && self.basis[i] < self.basis[li]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((i, _)) => self.pivot(i, j),
                None => return false,
            }
        }
    }
}

pub fn simplex_max(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    let cols = n + m;
    let mut t = Vec::with_capacity(m);
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; cols + 1];
        for j in 0..n {
            row[j] = sign * a[i][j];
        }
        row[n + i] = 1.0;
        row[cols] = sign * b[i];
        t.push(row);
    }
    let flips: Vec<f64> = b.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
    let mut tab = Tableau {
        m,
        cols,
        t,
        basis: (n..n + m).collect(),
    };

    let mut phase1 = vec![0.0; cols];
    for v in phase1.iter_mut().skip(n) {
        *v = -1.0;
    }
    tab.optimize(&phase1, n);
    let infeas: f64 = (0..m).filter(|&i| tab.basis[i] >= n).map(|i| tab.t[i][cols]).sum();
    if infeas > 1e-9 {
        // phase-one duals of the sign-adjusted system; undo the row flips
        let pi = tab.duals(&phase1, n);
        let farkas = pi.iter().zip(&flips).map(|(p, f)| -p * f).collect();
        return LpOutcome::Infeasible { farkas };
    }
    // drive zero-level artificials out of the basis where possible
    for i in 0..m {
        if tab.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !tab.basis.contains(&j) && tab.t[i][j].abs() > 1e-9) {
                tab.pivot(i, j);
            }
        }
    }
    let mut phase2 = vec![0.0; cols];
    phase2[..n].copy_from_slice(c);
    if !tab.optimize(&phase2, n) {
        return LpOutcome::Unbounded;
    }
    let mut y = vec![0.0; n];
    for i in 0..m {
        if tab.basis[i] < n {
            y[tab.basis[i]] = tab.t[i][cols];
        }
    }
    let value = y.iter().zip(c).map(|(a, b)| a * b).sum();
    let pi = tab.duals(&phase2, n);
    let duals = pi.iter().zip(&flips).map(|(p, f)| p * f).collect();
    LpOutcome::Optimal { y, value, duals }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_optimum() {
        // max 3y0 + 2y1, y0 + y1 + s0 = 4, y0 + 3y1 + s1 = 6
        let a = vec![vec![1.0, 1.0, 1.0, 0.0], vec![1.0, 3.0, 0.0, 1.0]];
        match simplex_max(&a, &[4.0, 6.0], &[3.0, 2.0, 0.0, 0.0]) {
            LpOutcome::Optimal { y, value, duals } => {
                assert!((value - 12.0).abs() < 1e-12);
                assert!((y[0] - 4.0).abs() < 1e-12);
                let dual_obj = duals[0] * 4.0 + duals[1] * 6.0;
                assert!((dual_obj - value).abs() < 1e-10);
                for j in 0..4 {
                    let lhs = duals[0] * a[0][j] + duals[1] * a[1][j];
                    assert!(lhs >= [3.0, 2.0, 0.0, 0.0][j] - 1e-10);
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_has_certificate() {
        // y0 - y1 = -1, y0 + y1 = 0 forces y1 = 1/2 and y0 = -1/2
        let a = vec![vec![1.0, -1.0], vec![1.0, 1.0]];
        let b = [-1.0, 0.0];
        match simplex_max(&a, &b, &[0.0, 0.0]) {
            LpOutcome::Infeasible { farkas } => {
                for j in 0..2 {
                    let v = farkas[0] * a[0][j] + farkas[1] * a[1][j];
                    assert!(v <= 1e-9, "column {j}: {v}");
                }
                assert!(farkas[0] * b[0] + farkas[1] * b[1] > 0.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unbounded_detected() {
        let a = vec![vec![1.0, -1.0]];
        assert_eq!(simplex_max(&a, &[0.0], &[1.0, 0.0]), LpOutcome::Unbounded);
    }
}
