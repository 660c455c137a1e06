use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;

/// Tolerance for the trace identity on custom coefficients.
pub const TRACE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum PolyKind {
    Linear(Vec<f64>),
    /// `x_i²/Σ_ii - x_j²/Σ_jj`.
    Quad(usize, usize),
    /// `x_i x_j` with `i ≠ j`.
    Mixed(usize, usize),
    Custom(Vec<(Vec<u8>, f64)>),
}

impl PolyKind {
    /// `linear:a1,a2`, `quad:i,j`, `mixed:i,j` or `custom:e1,e2=c;...`
    /// (axes zero-based, exponents per axis).
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |m: String| Error::Argument(format!("polynomial kind `{text}`: {m}"));
        let (head, rest) = text.split_once(':').unwrap_or((text, ""));
        let ints = |s: &str| -> Result<Vec<usize>> {
            s.split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|e| bad(e.to_string())))
                .collect()
        };
        match head {
            "linear" => Ok(Self::Linear(
                rest.split(',')
                    .map(|t| t.trim().parse::<f64>().map_err(|e| bad(e.to_string())))
                    .collect::<Result<_>>()?,
            )),
            "quad" | "mixed" => {
                let v = ints(rest)?;
                if v.len() != 2 {
                    return Err(bad("expected two axes".into()));
                }
                Ok(if head == "quad" {
                    Self::Quad(v[0], v[1])
                } else {
                    Self::Mixed(v[0], v[1])
                })
            }
            "custom" => {
                let mut terms = Vec::new();
                for t in rest.split(';').filter(|t| !t.trim().is_empty()) {
                    let (e, c) = t.split_once('=').ok_or_else(|| bad(format!("term `{t}` lacks `=`")))?;
                    let exps = e
                        .split(',')
                        .map(|v| v.trim().parse::<u8>().map_err(|er| bad(er.to_string())))
                        .collect::<Result<Vec<_>>>()?;
                    let c = c.trim().parse::<f64>().map_err(|er| bad(er.to_string()))?;
                    terms.push((exps, c));
                }
                Ok(Self::Custom(terms))
            }
            _ => Err(bad("unknown kind".into())),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Linear(_) => "linear".into(),
            Self::Quad(i, j) => format!("quad{i}{j}"),
            Self::Mixed(i, j) => format!("mixed{i}{j}"),
            Self::Custom(_) => "custom".into(),
        }
    }
}

/// A polynomial of degree at most 3, stored as exponent vector → coefficient.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaHarmonicFunction {
    pub dim: usize,
    pub sigma: Vec<f64>,
    pub kind: PolyKind,
    pub terms: BTreeMap<Vec<u8>, f64>,
    /// Sup over the unit ball of all second partials.
    pub delta2: f64,
    /// Sup of all third partials (constants).
    pub delta3: f64,
}

type Terms = BTreeMap<Vec<u8>, f64>;

fn derivative(terms: &Terms, axis: usize) -> Terms {
    let mut out = Terms::new();
    for (e, &c) in terms {
        if e[axis] == 0 {
            continue;
        }
        let mut f = e.clone();
        f[axis] -= 1;
        *out.entry(f).or_insert(0.0) += c * e[axis] as f64;
    }
    out.retain(|_, c| *c != 0.0);
    out
}

/// `sup_{|x| ≤ 1} |p(x)|` for `p` of degree at most one.
fn affine_sup(p: &Terms) -> f64 {
    let mut constant = 0.0;
    let mut grad2 = 0.0;
    for (e, &c) in p {
        let deg: u32 = e.iter().map(|&v| v as u32).sum();
        match deg {
            0 => constant += c,
            1 => grad2 += c * c,
            _ => unreachable!("second partials of a cubic are affine"),
        }
    }
    constant.abs() + grad2.sqrt()
}

impl SigmaHarmonicFunction {
    /// Builds `F` for diagonal `Σ` and checks `Σ_i Σ_ii ∂_ii F ≡ 0`.
    pub fn new(sigma: &[f64], kind: PolyKind) -> Result<Self> {
        let d = sigma.len();
        if d == 0 || sigma.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::Argument(format!("Σ must be positive diagonal, got {sigma:?}")));
        }
        let axis_ok = |i: usize| {
            if i < d {
                Ok(())
            } else {
                Err(Error::Argument(format!("axis {i} out of range for d={d}")))
            }
        };
        let unit = |i: usize, p: u8| {
            let mut e = vec![0u8; d];
            e[i] = p;
            e
        };
        let mut terms = Terms::new();
        match &kind {
            PolyKind::Linear(a) => {
                if a.len() != d {
                    return Err(Error::Argument(format!("linear coefficients need {d} entries")));
                }
                for (i, &c) in a.iter().enumerate() {
                    if c != 0.0 {
                        terms.insert(unit(i, 1), c);
                    }
                }
            }
            PolyKind::Quad(i, j) => {
                axis_ok(*i)?;
                axis_ok(*j)?;
                if i == j {
                    return Err(Error::Argument("quad needs two distinct axes".into()));
                }
                terms.insert(unit(*i, 2), 1.0 / sigma[*i]);
                terms.insert(unit(*j, 2), -1.0 / sigma[*j]);
            }
            PolyKind::Mixed(i, j) => {
                axis_ok(*i)?;
                axis_ok(*j)?;
                if i == j {
                    return Err(Error::Argument("mixed needs two distinct axes".into()));
                }
                let mut e = vec![0u8; d];
                e[*i] = 1;
                e[*j] = 1;
                terms.insert(e, 1.0);
            }
            PolyKind::Custom(list) => {
                for (e, c) in list {
                    if e.len() != d {
                        return Err(Error::Argument(format!("exponent vector {e:?} needs {d} entries")));
                    }
                    if e.iter().map(|&v| v as u32).sum::<u32>() > 3 {
                        return Err(Error::Argument(format!("term {e:?} exceeds degree 3")));
                    }
                    *terms.entry(e.clone()).or_insert(0.0) += c;
                }
                terms.retain(|_, c| *c != 0.0);
            }
        }
        let mut trace = Terms::new();
        for (i, s) in sigma.iter().enumerate() {
            for (e, c) in derivative(&derivative(&terms, i), i) {
                *trace.entry(e).or_insert(0.0) += s * c;
            }
        }
        let worst = trace.values().fold(0.0f64, |m, c| m.max(c.abs()));
        if worst > TRACE_TOL {
            return Err(Error::NotSigmaHarmonic { max_coefficient: worst });
        }
        let mut delta2: f64 = 0.0;
        let mut delta3: f64 = 0.0;
        for i in 0..d {
            let di = derivative(&terms, i);
            for j in 0..d {
                let dij = derivative(&di, j);
                delta2 = delta2.max(affine_sup(&dij));
                for k in 0..d {
                    let dijk = derivative(&dij, k);
                    delta3 = delta3.max(dijk.values().fold(0.0, |m, c| m + c.abs()));
                }
            }
        }
        Ok(Self {
            dim: d,
            sigma: sigma.to_vec(),
            kind,
            terms,
            delta2,
            delta3,
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(x).map(|(&p, v)| v.powi(p as i32)).product::<f64>())
            .sum()
    }

    /// `F_R(x) = F(x / R)`.
    pub fn eval_scaled(&self, x: &[i64], radius: f64) -> f64 {
        let y: Vec<f64> = x.iter().map(|&v| v as f64 / radius).collect();
        self.eval(&y)
    }

    pub fn is_linear(&self) -> bool {
        self.terms.keys().all(|e| e.iter().map(|&v| v as u32).sum::<u32>() <= 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quad_for_identity_and_diagonal() {
        let f = SigmaHarmonicFunction::new(&[1.0, 1.0], PolyKind::Quad(0, 1)).unwrap();
        assert_eq!(f.eval(&[2.0, 1.0]), 3.0);
        assert_eq!(f.delta2, 2.0);
        assert_eq!(f.delta3, 0.0);
        let g = SigmaHarmonicFunction::new(&[0.5, 0.25], PolyKind::Quad(0, 1)).unwrap();
        assert_eq!(g.eval(&[1.0, 1.0]), 2.0 - 4.0);
    }

    #[test]
    fn linear_has_flat_partials() {
        let f = SigmaHarmonicFunction::new(&[0.3, 0.7], PolyKind::Linear(vec![2.0, -1.0])).unwrap();
        assert_eq!((f.delta2, f.delta3), (0.0, 0.0));
        assert!(f.is_linear());
        assert_eq!(f.eval_scaled(&[4, 2], 2.0), 3.0);
    }

    #[test]
    fn custom_cubic_bounds() {
        // x³ - 3xy² is harmonic for Σ = I
        let kind = PolyKind::parse("custom:3,0=1;1,2=-3").unwrap();
        let f = SigmaHarmonicFunction::new(&[1.0, 1.0], kind).unwrap();
        // ∂xx = 6x, ∂xy = -6y, ∂yy = -6x: sup over the unit ball is 6
        assert!((f.delta2 - 6.0).abs() < 1e-12);
        assert_eq!(f.delta3, 6.0);
    }

    #[test]
    fn non_harmonic_custom_rejected() {
        let kind = PolyKind::parse("custom:2,0=1").unwrap();
        assert!(matches!(
            SigmaHarmonicFunction::new(&[1.0, 1.0], kind),
            Err(Error::NotSigmaHarmonic { .. })
        ));
    }

    #[test]
    fn parse_kinds() {
        assert_eq!(PolyKind::parse("quad:0,1").unwrap(), PolyKind::Quad(0, 1));
        assert_eq!(PolyKind::parse("linear:1,2.5").unwrap(), PolyKind::Linear(vec![1.0, 2.5]));
        assert!(PolyKind::parse("cubic:1").is_err());
    }
}
